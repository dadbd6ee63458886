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
#include <cmath>
#include <limits>

#include "edysec/dataset.hpp"
#include "edysec/featsel.hpp"
#include "test_util.hpp"

namespace edysec {
namespace {

ProcessedMatrix Numeric(const std::vector<std::vector<double>>& cols, std::vector<int> labels) {
  ProcessedMatrix pm;
  pm.x = Matrix(labels.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string name = "c" + std::to_string(c);
    pm.features.push_back(name);
    pm.column_map.push_back({name, FeatureKind::kNumeric});
    for (std::size_t r = 0; r < labels.size(); ++r) pm.x(r, c) = cols[c][r];
  }
  pm.labels = std::move(labels);
  pm.ids.resize(pm.labels.size());
  return pm;
}

TEST(Objective, DefinitionAndValidation) {
  EXPECT_DOUBLE_EQ(Objective(0.9, 10, 20, 0.5), 0.5 * 0.9 + 0.5 * 0.5);
  EXPECT_DOUBLE_EQ(Objective(0.9, 20, 20, 1.0), 0.9);
  EXPECT_EDYSEC_ERROR(Objective(0.9, 0, 20, 0.5), ErrorCode::kInvalidArgument);
  EXPECT_EDYSEC_ERROR(Objective(0.9, 21, 20, 0.5), ErrorCode::kInvalidArgument);
  EXPECT_EDYSEC_ERROR(Objective(0.9, 2, 20, 1.5), ErrorCode::kInvalidArgument);
}

SelectorResult Result(SelectorMethod m, double score, std::size_t k, std::size_t d, double alpha) {
  SelectorResult r;
  r.method = m;
  for (std::size_t i = 0; i < k; ++i) r.selected.push_back("f" + std::to_string(i));
  r.score = score;
  r.objective = Objective(score, k, d, alpha);
  return r;
}

TEST(ChooseSelector, PublishedSelectorTrade) {
  const std::vector<SelectorResult> rs = {
      Result(SelectorMethod::kAnova, 0.98, 12, 36, 0.95),
      Result(SelectorMethod::kCorr, 0.99, 30, 36, 0.95),
      Result(SelectorMethod::kImportance, 0.99, 17, 36, 0.95),
      Result(SelectorMethod::kPso, 0.99, 19, 36, 0.95),
      Result(SelectorMethod::kWoa, 0.99, 24, 36, 0.95)};
  const auto best = ChooseSelector(rs);
  EXPECT_EQ(best.method, SelectorMethod::kImportance);
  EXPECT_EQ(FormatFixed(100.0 * (1.0 - 17.0 / 36.0), 2), "52.78");
}

TEST(ChooseSelector, TiesPreferFewerFeaturesThenMethodOrder) {
  SelectorResult a = Result(SelectorMethod::kWoa, 0.9, 3, 10, 1.0);
  SelectorResult b = Result(SelectorMethod::kAnova, 0.9, 4, 10, 1.0);
  SelectorResult c = Result(SelectorMethod::kCorr, 0.9, 3, 10, 1.0);
  EXPECT_EQ(ChooseSelector({b, a, c}).method, SelectorMethod::kCorr);
  EXPECT_EDYSEC_ERROR(ChooseSelector({}), ErrorCode::kInvalidArgument);
}

TEST(MethodName, RoundTrip) {
  for (auto m : {SelectorMethod::kAnova, SelectorMethod::kCorr, SelectorMethod::kImportance,
                 SelectorMethod::kPso, SelectorMethod::kWoa}) {
    EXPECT_EQ(ParseMethod(MethodName(m)), m);
  }
  EXPECT_ANY_THROW(ParseMethod("lasso"));
}

TEST(TwoGroupF, MatchesTextbookValueAndEdges) {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6};
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  // means 2 and 5, grand 3.5: SSB = 6 * 2.25 = 13.5, SSW = 4, F = 13.5 / (4 / 4).
  EXPECT_DOUBLE_EQ(TwoGroupF(v, y), 13.5);
  const std::vector<double> flat = {1, 1, 1, 1, 1, 1};
  EXPECT_EQ(TwoGroupF(flat, y), 0.0);
  const std::vector<double> perfect = {0, 0, 0, 1, 1, 1};
  EXPECT_EQ(TwoGroupF(perfect, y), std::numeric_limits<double>::infinity());
  const std::vector<int> one = {1, 1, 1, 1, 1, 1};
  EXPECT_EDYSEC_ERROR(TwoGroupF(v, one), ErrorCode::kSingleClass);
}

TEST(SelectAnova, TopKInManifestOrder) {
  const std::vector<FeatureScore> s = {{"a", 1.0}, {"b", 9.0}, {"c", 5.0}, {"d", 9.0}};
  EXPECT_EQ(SelectAnova(s, 2).selected, (std::vector<std::string>{"b", "d"}));
  EXPECT_EQ(SelectAnova(s, 3).selected, (std::vector<std::string>{"b", "c", "d"}));
  EXPECT_EDYSEC_ERROR(SelectAnova(s, 0), ErrorCode::kBadK);
  EXPECT_EDYSEC_ERROR(SelectAnova(s, 5), ErrorCode::kBadK);
}

TEST(SelectCorr, RelevanceThenRedundancy) {
  const std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  const std::vector<double> strong = {0, 0.1, 0.2, 0.1, 1, 1.1, 0.9, 1.0};
  std::vector<double> copy;
  for (double v : strong) copy.push_back(2 * v + 0.001 * v * v);  // near duplicate
  const std::vector<double> noise = {1, -1, 1, -1, 1, -1, 1, -1};
  const auto pm = Numeric({copy, noise, strong}, y);
  const auto r = SelectCorr(pm, 0.1, 0.9);
  ASSERT_EQ(r.selected.size(), 1u);
  const auto loose = SelectCorr(pm, 0.1, 1.0);
  EXPECT_EQ(loose.selected, (std::vector<std::string>{"c0", "c2"}));
  EXPECT_EDYSEC_ERROR(SelectCorr(pm, 1.0, 0.9), ErrorCode::kEmptyResult);
}

TEST(Project, KeepsOwnedColumnsInOrder) {
  ProcessedMatrix pm = Numeric({{1, 2}, {3, 4}, {5, 6}}, {0, 1});
  pm.column_map[2].feature = "c0";  // c0 owns two columns now
  pm.features = {"c0", "c1"};
  const auto p = Project(pm, {"c0"});
  EXPECT_EQ(p.width(), 2u);
  EXPECT_EQ(p.x(1, 0), 2.0);
  EXPECT_EQ(p.x(1, 1), 6.0);
  EXPECT_EDYSEC_ERROR(Project(pm, {"zz"}), ErrorCode::kUnknownFeature);
}

TEST(SelectImportance, ThresholdRelativeToMax) {
  const std::vector<FeatureScore> s = {{"a", 0.2}, {"b", 0.09}, {"c", 0.1}, {"d", -0.01}};
  EXPECT_EQ(SelectImportance(s, 0.5).selected, (std::vector<std::string>{"a", "c"}));
  const std::vector<FeatureScore> none = {{"a", 0.0}, {"b", -0.1}};
  EXPECT_EDYSEC_ERROR(SelectImportance(none, 0.5), ErrorCode::kEmptyResult);
}

TEST(PermutationImportance, OnlyTheUsedFeatureMatters) {
  // Hand-built model that reads column 0 only.
  NetworkParams p;
  p.spec = {2, {}};
  p.layers = {DenseLayer(2, 1)};
  p.layers[0].weights = {10.0, 0.0};
  std::vector<int> y;
  std::vector<double> a, b;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    y.push_back(i % 2);
    a.push_back(i % 2 ? 1.0 : -1.0);
    b.push_back(rng.Normal());
  }
  const auto imp = PermutationImportance(p, Numeric({a, b}, y), 3, 1);
  EXPECT_GT(imp[0].value, 0.3);
  EXPECT_EQ(imp[1].value, 0.0);
}

// Fitness with a known optimum: reward the first 4 bits, penalise the rest.
double ToyFitness(const FeatureMask& m) {
  double s = 0;
  for (std::size_t j = 0; j < m.size(); ++j) s += j < 4 ? (m[j] ? 1.0 : 0.0) : (m[j] ? -0.5 : 0.0);
  return s;
}

TEST(Swarms, HistoryIsMonotoneAndCountsEvaluations) {
  SwarmConfig cfg;
  cfg.population = 12;
  cfg.iterations = 40;
  for (auto* run : {&SelectBpso, &SelectBwoa}) {
    const auto r = (*run)(ToyFitness, 16, cfg);
    EXPECT_EQ(r.best_history.size(), cfg.iterations + 1);
    EXPECT_TRUE(std::is_sorted(r.best_history.begin(), r.best_history.end()));
    EXPECT_EQ(r.best_history.back(), r.fitness);
    EXPECT_EQ(r.evaluations, cfg.population * (cfg.iterations + 1));
    EXPECT_EQ(ToyFitness(r.mask), r.fitness);
  }
}

// Brute force over all 2^d masks of a random additive fitness; default
// budget should reach the optimum on at least 8 of 10 seeds.
TEST(Swarms, MatchBruteForceOptimum) {
  for (std::size_t d : {10u, 12u}) {
    std::size_t pso_hits = 0, woa_hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed * 31);
      std::vector<double> w(d);
      for (double& v : w) v = rng.Uniform(-1.0, 1.0);
      auto fit = [&](const FeatureMask& m) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) s += m[j] ? w[j] : 0.0;
        return s;
      };
      double best = -1e300;
      for (std::size_t bits = 1; bits < (std::size_t{1} << d); ++bits) {
        FeatureMask m(d);
        for (std::size_t j = 0; j < d; ++j) m[j] = (bits >> j) & 1u;
        best = std::max(best, fit(m));
      }
      SwarmConfig cfg;
      cfg.seed = seed;
      pso_hits += SelectBpso(fit, d, cfg).fitness == best;
      woa_hits += SelectBwoa(fit, d, cfg).fitness == best;
    }
    EXPECT_GE(pso_hits, 8u) << "d=" << d;
    EXPECT_GE(woa_hits, 8u) << "d=" << d;
  }
}

TEST(Swarms, NeverEvaluateEmptyMasksAndRepeatPerSeed) {
  SwarmConfig cfg;
  cfg.population = 6;
  cfg.iterations = 10;
  auto guard = [](const FeatureMask& m) {
    EXPECT_GE(PopCount(m), 1u);
    return -static_cast<double>(PopCount(m));
  };
  for (auto* run : {&SelectBpso, &SelectBwoa}) {
    const auto a = (*run)(guard, 5, cfg);
    const auto b = (*run)(guard, 5, cfg);
    EXPECT_EQ(a.mask, b.mask);
    EXPECT_EQ(a.best_history, b.best_history);
    EXPECT_EQ(PopCount(a.mask), 1u);
  }
  cfg.population = 1;
  EXPECT_EDYSEC_ERROR(SelectBpso(guard, 5, cfg), ErrorCode::kInvalidArgument);
}

TEST(SubsetEvaluator, CachesAndScoresEmptyBlocks) {
  SyntheticConfig sc;
  sc.rows = 200;
  sc.noise = 3;
  sc.informative = 2;
  const auto ds = GenerateSynthetic(sc);
  const auto splits = SplitDataset(ds, {}, 1);
  const auto pre = Preprocessor::Fit(splits.train);
  const auto tr = pre.Transform(splits.train), vd = pre.Transform(splits.validation);
  SubsetEvaluator eval(tr, vd, TrainConfig::Baseline(1), 0.9);
  const auto informative = InformativeFeatures(ds.manifest);
  const double s1 = eval.Score(informative);
  EXPECT_EQ(eval.trainings(), 1u);
  EXPECT_EQ(eval.Score(informative), s1);
  EXPECT_EQ(eval.trainings(), 1u);
  EXPECT_GE(s1, 0.95);
  SelectorResult r{SelectorMethod::kAnova, informative};
  eval.Complete(r);
  EXPECT_DOUBLE_EQ(r.objective, Objective(s1, 2, 5, 0.9));
}

}  // namespace
}  // namespace edysec
