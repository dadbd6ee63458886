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

// Trace-feature datasets: typed manifest, CSV ingest, per-trace projection,
// stratified splitting and a planted-signal synthetic generator.

#ifndef EDYSEC_DATASET_HPP_
#define EDYSEC_DATASET_HPP_

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "edysec/common.hpp"
#include "edysec/csv.hpp"
#include "json.hpp"

namespace edysec {

enum class FeatureKind { kNumeric, kCategorical, kPattern };

enum class TraceCategory { kFiletop, kOpensnoop, kInstall, kTcp, kSysCall, kPattern };

inline constexpr std::array<TraceCategory, 6> kAllTraces = {
    TraceCategory::kFiletop, TraceCategory::kOpensnoop, TraceCategory::kInstall,
    TraceCategory::kTcp,     TraceCategory::kSysCall,   TraceCategory::kPattern};

inline std::string_view KindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNumeric: return "numeric";
    case FeatureKind::kCategorical: return "categorical";
    case FeatureKind::kPattern: return "pattern";
  }
  return "numeric";
}

inline FeatureKind ParseKind(std::string_view name) {
  if (name == "numeric") return FeatureKind::kNumeric;
  if (name == "categorical") return FeatureKind::kCategorical;
  if (name == "pattern") return FeatureKind::kPattern;
  throw Error(ErrorCode::kBadManifest, "unknown feature kind '" + std::string(name) + "'");
}

inline std::string_view TraceName(TraceCategory trace) {
  switch (trace) {
    case TraceCategory::kFiletop: return "Filetop";
    case TraceCategory::kOpensnoop: return "Opensnoop";
    case TraceCategory::kInstall: return "Install";
    case TraceCategory::kTcp: return "TCP";
    case TraceCategory::kSysCall: return "SysCall";
    case TraceCategory::kPattern: return "Pattern";
  }
  return "Filetop";
}

inline TraceCategory ParseTrace(std::string_view name) {
  for (TraceCategory t : kAllTraces) {
    if (TraceName(t) == name) return t;
  }
  throw Error(ErrorCode::kBadManifest, "unknown trace category '" + std::string(name) + "'");
}

inline bool IsTextKind(FeatureKind kind) { return kind != FeatureKind::kNumeric; }

struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  TraceCategory trace = TraceCategory::kFiletop;
  // Ground-truth flag written by the synthetic generator; false for real data.
  bool informative = false;

  bool operator==(const FeatureColumn&) const = default;
};

struct FeatureManifest {
  std::string id_column = "package";
  std::string label_column = "label";
  std::vector<FeatureColumn> features;

  bool operator==(const FeatureManifest&) const = default;

  void Validate() const {
    Require(!id_column.empty() && !label_column.empty(),
            "id and label columns must be named", ErrorCode::kBadManifest);
    Require(id_column != label_column, "id and label columns must differ",
            ErrorCode::kBadManifest);
    std::set<std::string> seen;
    for (const auto& f : features) {
      Require(!f.name.empty(), "feature name must be nonempty", ErrorCode::kBadManifest);
      Require(f.name != id_column && f.name != label_column,
              "id/label column '" + f.name + "' listed as a feature",
              ErrorCode::kBadManifest);
      Require(seen.insert(f.name).second, "duplicate feature column '" + f.name + "'",
              ErrorCode::kBadManifest);
    }
  }

  std::optional<std::size_t> IndexOf(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::vector<std::string> FeatureNames() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(f.name);
    return names;
  }
};

inline nlohmann::json ManifestToJson(const FeatureManifest& m) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : m.features) {
    nlohmann::json entry = {{"name", f.name},
                            {"kind", std::string(KindName(f.kind))},
                            {"trace", std::string(TraceName(f.trace))}};
    if (f.informative) entry["informative"] = true;
    features.push_back(std::move(entry));
  }
  return {{"version", 1},
          {"id_column", m.id_column},
          {"label_column", m.label_column},
          {"features", std::move(features)}};
}

inline FeatureManifest ManifestFromJson(const nlohmann::json& j) {
  try {
    Require(j.value("version", 0) == 1, "unsupported manifest version",
            ErrorCode::kBadManifest);
    FeatureManifest m;
    m.id_column = j.at("id_column").get<std::string>();
    m.label_column = j.at("label_column").get<std::string>();
    for (const auto& f : j.at("features")) {
      FeatureColumn col;
      col.name = f.at("name").get<std::string>();
      col.kind = ParseKind(f.at("kind").get<std::string>());
      col.trace = ParseTrace(f.at("trace").get<std::string>());
      col.informative = f.value("informative", false);
      m.features.push_back(std::move(col));
    }
    m.Validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadManifest, e.what());
  }
}

inline FeatureManifest LoadManifest(const std::string& path) {
  const std::string text = csv::ReadFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadManifest, path + ": " + e.what());
  }
  return ManifestFromJson(j);
}

inline void SaveManifest(const FeatureManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kWriteFailure, "cannot write " + path);
  out << ManifestToJson(m).dump(2) << '\n';
}

// Numeric kinds hold double, text kinds hold the verbatim string.
using Cell = std::variant<double, std::string>;

struct TraceRow {
  std::string id;
  std::vector<Cell> cells;  // aligned with manifest.features
  int label = 0;

  bool operator==(const TraceRow&) const = default;
};

struct TraceDataset {
  FeatureManifest manifest;
  std::vector<TraceRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  bool operator==(const TraceDataset&) const = default;

  std::size_t CountLabel(int label) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [&](const TraceRow& r) { return r.label == label; }));
  }
};

inline std::optional<double> ParseFiniteDouble(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline TraceDataset ParseDataset(std::string_view text, const FeatureManifest& manifest) {
  manifest.Validate();
  auto records = csv::Parse(text);
  Require(!records.empty(), "CSV has no header row", ErrorCode::kMissingColumn);
  const auto& header = records.front();
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

  auto column_index = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end()) {
      throw Error(ErrorCode::kMissingColumn, "header lacks column '" + name + "'",
                  std::nullopt, name);
    }
    return it->second;
  };
  const std::size_t id_at = column_index(manifest.id_column);
  const std::size_t label_at = column_index(manifest.label_column);
  std::vector<std::size_t> feature_at;
  for (const auto& f : manifest.features) feature_at.push_back(column_index(f.name));

  TraceDataset ds;
  ds.manifest = manifest;
  std::unordered_set<std::string> ids;
  std::size_t row_number = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    ++row_number;
    if (rec.size() != header.size()) {
      throw Error(ErrorCode::kMissingColumn,
                  "row " + std::to_string(row_number) + " has " + std::to_string(rec.size()) +
                      " fields, header has " + std::to_string(header.size()),
                  row_number);
    }
    TraceRow row;
    row.id = rec[id_at];
    if (!ids.insert(row.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id '" + row.id + "'", row_number,
                  row.id);
    }
    const std::string& label_text = rec[label_at];
    if (label_text == "0") {
      row.label = 0;
    } else if (label_text == "1") {
      row.label = 1;
    } else {
      auto v = ParseFiniteDouble(label_text);
      if (v && (*v == 0.0 || *v == 1.0)) {
        row.label = static_cast<int>(*v);
      } else {
        throw Error(ErrorCode::kBadLabel,
                    "row " + std::to_string(row_number) + " label '" + label_text + "'",
                    row_number, manifest.label_column);
      }
    }
    row.cells.reserve(manifest.features.size());
    for (std::size_t f = 0; f < manifest.features.size(); ++f) {
      const std::string& raw = rec[feature_at[f]];
      if (manifest.features[f].kind == FeatureKind::kNumeric) {
        auto v = ParseFiniteDouble(raw);
        if (!v) {
          throw Error(ErrorCode::kBadNumeric,
                      "row " + std::to_string(row_number) + " column '" +
                          manifest.features[f].name + "' value '" + raw + "'",
                      row_number, manifest.features[f].name);
        }
        row.cells.emplace_back(*v);
      } else {
        row.cells.emplace_back(raw);
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

inline TraceDataset LoadDataset(const std::string& csv_path, const FeatureManifest& manifest) {
  return ParseDataset(csv::ReadFile(csv_path), manifest);
}

inline std::string CellToText(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return FormatDouble(*d);
  return std::get<std::string>(cell);
}

inline std::string SerializeDataset(const TraceDataset& ds) {
  std::string out;
  csv::Record header = {ds.manifest.id_column};
  for (const auto& f : ds.manifest.features) header.push_back(f.name);
  header.push_back(ds.manifest.label_column);
  csv::AppendRecord(out, header);
  for (const auto& row : ds.rows) {
    csv::Record rec = {row.id};
    for (const auto& c : row.cells) rec.push_back(CellToText(c));
    rec.push_back(std::to_string(row.label));
    csv::AppendRecord(out, rec);
  }
  return out;
}

inline void SaveDataset(const TraceDataset& ds, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kWriteFailure, "cannot write " + csv_path);
  out << SerializeDataset(ds);
  if (!out) throw Error(ErrorCode::kWriteFailure, "short write to " + csv_path);
}

inline TraceDataset ProjectTraces(const TraceDataset& ds,
                                  const std::set<TraceCategory>& traces) {
  Require(!traces.empty(), "trace selection must be nonempty");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.manifest.features.size(); ++i) {
    if (traces.count(ds.manifest.features[i].trace)) keep.push_back(i);
  }
  if (keep.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no feature column belongs to the selected traces");
  }
  TraceDataset out;
  out.manifest.id_column = ds.manifest.id_column;
  out.manifest.label_column = ds.manifest.label_column;
  for (std::size_t i : keep) out.manifest.features.push_back(ds.manifest.features[i]);
  out.rows.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    TraceRow r;
    r.id = row.id;
    r.label = row.label;
    for (std::size_t i : keep) r.cells.push_back(row.cells[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

struct SplitRatios {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

struct DatasetSplits {
  TraceDataset train;
  TraceDataset validation;
  TraceDataset test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

namespace detail {

// Largest-remainder apportionment of n items by the three ratios.
inline std::array<std::size_t, 3> Apportion(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> ratio = {r.train, r.validation, r.test};
  std::array<std::size_t, 3> count{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = ratio[i] * static_cast<double>(n);
    count[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += count[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++count[order[k]];
  return count;
}

}  // namespace detail

// Stratified mode shuffles each class, spreads its rows evenly over [0, 1)
// and cuts the merged order into contiguous chunks, so every chunk holds each
// class within one row of its global share.
inline DatasetSplits SplitDataset(const TraceDataset& ds, const SplitRatios& ratios,
                                  std::uint64_t seed, bool stratified = true) {
  if (!(ratios.train > 0 && ratios.validation > 0 && ratios.test > 0) ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kBadRatios, "split ratios must be positive and sum to 1");
  }
  const std::size_t n = ds.rows.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  if (stratified) {
    std::vector<std::pair<double, std::pair<int, std::size_t>>> keyed;
    keyed.reserve(n);
    for (int label = 0; label <= 1; ++label) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (ds.rows[i].label == label) members.push_back(i);
      }
      Rng rng(DeriveSeed(seed, 0x5971u, static_cast<std::uint64_t>(label)));
      rng.Shuffle(members);
      const double m = static_cast<double>(members.size());
      for (std::size_t k = 0; k < members.size(); ++k) {
        keyed.push_back({(static_cast<double>(k) + 0.5) / m, {label, members[k]}});
      }
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& k : keyed) order.push_back(k.second.second);
  } else {
    for (std::size_t i = 0; i < n; ++i) order.push_back(i);
    Rng rng(DeriveSeed(seed, 0x5971u, 7));
    rng.Shuffle(order);
  }
  const auto count = detail::Apportion(n, ratios);
  DatasetSplits splits;
  splits.seed = seed;
  splits.ratios = ratios;
  for (TraceDataset* part : {&splits.train, &splits.validation, &splits.test}) {
    part->manifest = ds.manifest;
  }
  std::size_t cursor = 0;
  std::array<TraceDataset*, 3> parts = {&splits.train, &splits.validation, &splits.test};
  for (int p = 0; p < 3; ++p) {
    for (std::size_t k = 0; k < count[p]; ++k) parts[p]->rows.push_back(ds.rows[order[cursor++]]);
  }
  return splits;
}

struct SyntheticConfig {
  std::size_t rows = 1000;
  std::size_t informative = 5;
  std::size_t noise = 25;
  // Shift, in standard deviations, of the one informative column a malicious
  // row activates.
  double separation = 10.0;
  // Relative weights of numeric / categorical / pattern among noise columns.
  double numeric_weight = 0.6;
  double categorical_weight = 0.2;
  double pattern_weight = 0.2;
  std::uint64_t seed = 1;
};

// Informative columns are numeric and N(0,1), except that each malicious row
// picks one informative column uniformly and draws it from N(separation,1);
// every informative column is therefore needed to catch its share of the
// malicious rows. Columns are affinely rescaled afterwards. Noise columns
// ignore the label.
inline TraceDataset GenerateSynthetic(const SyntheticConfig& cfg) {
  Require(cfg.rows >= 4, "synthetic generator needs at least 4 rows");
  Require(cfg.informative >= 1, "synthetic generator needs an informative column");
  const double total_weight = cfg.numeric_weight + cfg.categorical_weight + cfg.pattern_weight;
  Require(cfg.numeric_weight >= 0 && cfg.categorical_weight >= 0 && cfg.pattern_weight >= 0 &&
              total_weight > 0,
          "kind weights must be nonnegative with a positive sum");

  Rng layout_rng(DeriveSeed(cfg.seed, 0x1a70u));
  const std::size_t d = cfg.informative + cfg.noise;
  std::vector<std::size_t> slots(d);
  for (std::size_t i = 0; i < d; ++i) slots[i] = i;
  layout_rng.Shuffle(slots);  // slots[k] = position of logical column k

  TraceDataset ds;
  ds.manifest.id_column = "package";
  ds.manifest.label_column = "label";
  ds.manifest.features.resize(d);
  std::vector<double> scale(d, 1.0), offset(d, 0.0);
  std::vector<std::size_t> informative_pos(cfg.informative);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t pos = slots[k];
    FeatureColumn& col = ds.manifest.features[pos];
    col.name = "f" + std::string(pos + 1 < 10 ? "0" : "") + std::to_string(pos + 1);
    col.trace = kAllTraces[pos % kAllTraces.size()];
    if (k < cfg.informative) {
      col.kind = FeatureKind::kNumeric;
      col.informative = true;
      informative_pos[k] = pos;
    } else {
      const double u = layout_rng.Uniform() * total_weight;
      col.kind = u < cfg.numeric_weight ? FeatureKind::kNumeric
                 : u < cfg.numeric_weight + cfg.categorical_weight ? FeatureKind::kCategorical
                                                                    : FeatureKind::kPattern;
    }
    scale[pos] = std::exp(layout_rng.Uniform(-1.0, 3.0));
    offset[pos] = layout_rng.Uniform(-10.0, 50.0);
  }

  static constexpr std::array<const char*, 8> kCategories = {
      "usr_lib", "tmp_dir", "home_cfg", "proc_self", "etc_hosts", "var_log", "dev_null", "opt_pkg"};
  static constexpr std::array<const char*, 10> kEvents = {
      "open", "read", "write", "connect", "fork", "exec", "mmap", "stat", "unlink", "clone"};

  std::vector<int> labels(cfg.rows);
  for (std::size_t i = 0; i < cfg.rows; ++i) labels[i] = static_cast<int>(i % 2);
  Rng label_rng(DeriveSeed(cfg.seed, 0x1abe1u));
  label_rng.Shuffle(labels);

  Rng value_rng(DeriveSeed(cfg.seed, 0xda7au));
  ds.rows.resize(cfg.rows);
  for (std::size_t i = 0; i < cfg.rows; ++i) {
    TraceRow& row = ds.rows[i];
    char id[32];
    std::snprintf(id, sizeof(id), "pkg-%06zu", i + 1);
    row.id = id;
    row.label = labels[i];
    row.cells.resize(d);
    const std::size_t active =
        row.label == 1 ? informative_pos[value_rng.Index(cfg.informative)] : d;
    for (std::size_t pos = 0; pos < d; ++pos) {
      const FeatureColumn& col = ds.manifest.features[pos];
      switch (col.kind) {
        case FeatureKind::kNumeric: {
          double z = value_rng.Normal();
          if (pos == active) z += cfg.separation;
          row.cells[pos] = offset[pos] + scale[pos] * z;
          break;
        }
        case FeatureKind::kCategorical:
          row.cells[pos] = std::string(kCategories[value_rng.Index(kCategories.size())]);
          break;
        case FeatureKind::kPattern: {
          const std::size_t len = value_rng.Index(5);
          std::string text;
          for (std::size_t t = 0; t < len; ++t) {
            if (t > 0) text += ";";
            text += kEvents[value_rng.Index(kEvents.size())];
          }
          row.cells[pos] = std::move(text);
          break;
        }
      }
    }
  }
  return ds;
}

inline std::vector<std::string> InformativeFeatures(const FeatureManifest& m) {
  std::vector<std::string> out;
  for (const auto& f : m.features) {
    if (f.informative) out.push_back(f.name);
  }
  return out;
}

}  // namespace edysec

#endif  // EDYSEC_DATASET_HPP_
