/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <set>

#include "edysec/dataset.hpp"
#include "edysec/featsel.hpp"
#include "edysec/preprocess.hpp"
#include "test_util.hpp"

namespace edysec {
namespace {

FeatureManifest TwoTraceManifest() {
  FeatureManifest m;
  m.features = {{"n_open", FeatureKind::kNumeric, TraceCategory::kOpensnoop},
                {"tcp_bytes", FeatureKind::kNumeric, TraceCategory::kTcp},
                {"paths", FeatureKind::kCategorical, TraceCategory::kFiletop},
                {"calls", FeatureKind::kPattern, TraceCategory::kSysCall}};
  return m;
}

constexpr const char* kCsv =
    "package,n_open,tcp_bytes,paths,calls,label\n"
    "left-pad,3,0,usr_lib,open;read,0\n"
    "evil-pkg,40,1e4,\"tmp_dir,etc_hosts\",connect;exec,1\n"
    "quiet,0,0,,,0\n";

TEST(ParseDataset, ReadsTypedCells) {
  const auto ds = ParseDataset(kCsv, TwoTraceManifest());
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.rows[1].id, "evil-pkg");
  EXPECT_EQ(ds.rows[1].label, 1);
  EXPECT_EQ(std::get<double>(ds.rows[1].cells[1]), 1e4);
  EXPECT_EQ(std::get<std::string>(ds.rows[1].cells[2]), "tmp_dir,etc_hosts");
  EXPECT_EQ(std::get<std::string>(ds.rows[2].cells[3]), "");
  EXPECT_EQ(ds.CountLabel(0), 2u);
}

TEST(ParseDataset, ColumnOrderInFileDoesNotMatter) {
  const std::string shuffled =
      "label,calls,paths,tcp_bytes,n_open,package\n"
      "0,open;read,usr_lib,0,3,left-pad\n"
      "1,connect;exec,\"tmp_dir,etc_hosts\",1e4,40,evil-pkg\n"
      "0,,,0,0,quiet\n";
  EXPECT_EQ(ParseDataset(shuffled, TwoTraceManifest()), ParseDataset(kCsv, TwoTraceManifest()));
}

TEST(ParseDataset, BomAndCrlfAccepted) {
  std::string text = "\xEF\xBB\xBF" + std::string(kCsv);
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(ParseDataset(crlf, TwoTraceManifest()).size(), 3u);
}

TEST(ParseDataset, HeaderOnlyIsEmpty) {
  const auto ds = ParseDataset("package,n_open,tcp_bytes,paths,calls,label\n", TwoTraceManifest());
  EXPECT_TRUE(ds.empty());
}

TEST(ParseDataset, MissingColumnNamesTheColumn) {
  try {
    ParseDataset("package,n_open,paths,calls,label\nx,1,a,b,0\n", TwoTraceManifest());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingColumn);
    EXPECT_EQ(e.subject(), "tcp_bytes");
  }
}

TEST(ParseDataset, BadLabelReportsRow) {
  std::string text = "package,n_open,tcp_bytes,paths,calls,label\n";
  for (int i = 1; i <= 4; ++i) text += "p" + std::to_string(i) + ",1,1,a,b,0\n";
  text += "p5,1,1,a,b,2\n";
  try {
    ParseDataset(text, TwoTraceManifest());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadLabel);
    EXPECT_EQ(e.row(), 5u);
  }
}

TEST(ParseDataset, BadNumericAndDuplicateId) {
  EXPECT_EDYSEC_ERROR(ParseDataset("package,n_open,tcp_bytes,paths,calls,label\nx,abc,1,a,b,0\n",
                                   TwoTraceManifest()),
                      ErrorCode::kBadNumeric);
  EXPECT_EDYSEC_ERROR(ParseDataset("package,n_open,tcp_bytes,paths,calls,label\nx,nan,1,a,b,0\n",
                                   TwoTraceManifest()),
                      ErrorCode::kBadNumeric);
  EXPECT_EDYSEC_ERROR(
      ParseDataset("package,n_open,tcp_bytes,paths,calls,label\nx,1,1,a,b,0\nx,2,2,a,b,1\n",
                   TwoTraceManifest()),
      ErrorCode::kDuplicateId);
}

TEST(Manifest, ValidationRejectsBadLayouts) {
  auto m = TwoTraceManifest();
  m.features.push_back(m.features[0]);
  EXPECT_EDYSEC_ERROR(m.Validate(), ErrorCode::kBadManifest);
  auto n = TwoTraceManifest();
  n.features[0].name = "label";
  EXPECT_EDYSEC_ERROR(n.Validate(), ErrorCode::kBadManifest);
}

TEST(Manifest, JsonRoundTrip) {
  auto m = TwoTraceManifest();
  m.features[0].informative = true;
  EXPECT_EQ(ManifestFromJson(ManifestToJson(m)), m);
  auto j = ManifestToJson(m);
  j["features"][0]["kind"] = "blob";
  EXPECT_EDYSEC_ERROR(ManifestFromJson(j), ErrorCode::kBadManifest);
}

TEST(Dataset, SaveLoadRoundTrip) {
  testing::TempDir dir("dataset");
  SyntheticConfig cfg;
  cfg.rows = 60;
  const auto ds = GenerateSynthetic(cfg);
  SaveDataset(ds, dir.File("d.csv"));
  SaveManifest(ds.manifest, dir.File("m.json"));
  const auto back = LoadDataset(dir.File("d.csv"), LoadManifest(dir.File("m.json")));
  EXPECT_EQ(back, ds);
}

TEST(ProjectTraces, KeepsOnlySelectedTraces) {
  const auto ds = ParseDataset(kCsv, TwoTraceManifest());
  const auto p = ProjectTraces(ds, {TraceCategory::kTcp, TraceCategory::kSysCall});
  ASSERT_EQ(p.manifest.features.size(), 2u);
  EXPECT_EQ(p.manifest.features[0].name, "tcp_bytes");
  EXPECT_EQ(p.manifest.features[1].name, "calls");
  EXPECT_EQ(p.rows[1].cells.size(), 2u);
  EXPECT_EQ(p.rows[1].label, 1);
}

TEST(ProjectTraces, AllTracesIsIdentityAndProjectionIsIdempotent) {
  const auto ds = ParseDataset(kCsv, TwoTraceManifest());
  const std::set<TraceCategory> all(kAllTraces.begin(), kAllTraces.end());
  EXPECT_EQ(ProjectTraces(ds, all), ds);
  const std::set<TraceCategory> some = {TraceCategory::kOpensnoop, TraceCategory::kFiletop};
  EXPECT_EQ(ProjectTraces(ProjectTraces(ds, some), some), ProjectTraces(ds, some));
}

TEST(ProjectTraces, NoMatchingColumnIsAnError) {
  const auto ds = ParseDataset(kCsv, TwoTraceManifest());
  EXPECT_EDYSEC_ERROR(ProjectTraces(ds, {TraceCategory::kInstall}), ErrorCode::kEmptySelection);
}

TraceDataset Labelled(std::size_t n, std::size_t positives) {
  TraceDataset ds;
  ds.manifest.features = {{"x", FeatureKind::kNumeric, TraceCategory::kFiletop}};
  for (std::size_t i = 0; i < n; ++i) {
    ds.rows.push_back({"r" + std::to_string(i), {static_cast<double>(i)}, i < positives ? 1 : 0});
  }
  return ds;
}

std::set<std::string> Ids(const TraceDataset& ds) {
  std::set<std::string> s;
  for (const auto& r : ds.rows) s.insert(r.id);
  return s;
}

TEST(SplitDataset, HundredBalancedRows) {
  const auto splits = SplitDataset(Labelled(100, 50), {}, 42);
  EXPECT_EQ(splits.train.size(), 70u);
  EXPECT_EQ(splits.validation.size(), 15u);
  EXPECT_EQ(splits.test.size(), 15u);
  EXPECT_EQ(splits.train.CountLabel(1), 35u);
  for (const auto* part : {&splits.validation, &splits.test}) {
    const auto pos = part->CountLabel(1);
    EXPECT_TRUE(pos == 7 || pos == 8) << pos;
  }
}

TEST(SplitDataset, PartitionPropertiesOverSeeds) {
  for (std::size_t n : {7u, 20u, 101u, 333u}) {
    const auto ds = Labelled(n, n / 3);
    const double share = static_cast<double>(n / 3) / static_cast<double>(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = SplitDataset(ds, {}, seed);
      EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), n);
      auto all = Ids(s.train);
      for (const auto* part : {&s.validation, &s.test}) {
        for (const auto& id : Ids(*part)) EXPECT_TRUE(all.insert(id).second) << "overlap " << id;
      }
      EXPECT_EQ(all, Ids(ds));
      for (const auto* part : {&s.train, &s.validation, &s.test}) {
        const double expected = share * static_cast<double>(part->size());
        EXPECT_LE(std::abs(static_cast<double>(part->CountLabel(1)) - expected), 1.0 + 1e-9)
            << "n=" << n << " seed=" << seed;
      }
    }
  }
}

TEST(SplitDataset, DeterministicPerSeed) {
  const auto ds = Labelled(90, 40);
  EXPECT_EQ(SplitDataset(ds, {}, 9).train, SplitDataset(ds, {}, 9).train);
  EXPECT_NE(SplitDataset(ds, {}, 9).train, SplitDataset(ds, {}, 10).train);
  EXPECT_EQ(SplitDataset(ds, {}, 9, false).test, SplitDataset(ds, {}, 9, false).test);
}

TEST(SplitDataset, RejectsBadRatios) {
  const auto ds = Labelled(10, 5);
  EXPECT_EDYSEC_ERROR(SplitDataset(ds, {0.5, 0.3, 0.3}, 1), ErrorCode::kBadRatios);
  EXPECT_EDYSEC_ERROR(SplitDataset(ds, {1.0, 0.0, 0.0}, 1), ErrorCode::kBadRatios);
}

TEST(Synthetic, LayoutAndDeterminism) {
  SyntheticConfig cfg;
  cfg.rows = 200;
  cfg.seed = 4;
  const auto a = GenerateSynthetic(cfg);
  EXPECT_EQ(a, GenerateSynthetic(cfg));
  EXPECT_EQ(a.manifest.features.size(), 30u);
  EXPECT_EQ(a.CountLabel(1), 100u);
  const auto informative = InformativeFeatures(a.manifest);
  EXPECT_EQ(informative.size(), 5u);
  for (const auto& name : informative) {
    EXPECT_EQ(a.manifest.features[*a.manifest.IndexOf(name)].kind, FeatureKind::kNumeric);
  }
  cfg.seed = 5;
  EXPECT_NE(GenerateSynthetic(cfg), a);
}

TEST(Synthetic, InformativeColumnsCarryTheSignal) {
  SyntheticConfig cfg;
  cfg.rows = 1000;
  const auto ds = GenerateSynthetic(cfg);
  const auto pm = Preprocessor::Fit(ds).Transform(ds);
  const auto scores = AnovaFScores(pm);
  const auto informative = InformativeFeatures(ds.manifest);
  double weakest_informative = 1e300, strongest_noise = 0;
  for (const auto& s : scores) {
    const bool inf = std::find(informative.begin(), informative.end(), s.feature) != informative.end();
    if (inf) weakest_informative = std::min(weakest_informative, s.value);
    else strongest_noise = std::max(strongest_noise, s.value);
  }
  EXPECT_GT(weakest_informative, 10 * strongest_noise);
}

TEST(Synthetic, ZeroSeparationCarriesNoSignal) {
  SyntheticConfig cfg;
  cfg.rows = 2000;
  cfg.separation = 0.0;
  const auto ds = GenerateSynthetic(cfg);
  const auto pm = Preprocessor::Fit(ds).Transform(ds);
  for (const auto& s : AnovaFScores(pm)) EXPECT_LT(s.value, 15.0) << s.feature;
}

}  // namespace
}  // namespace edysec
