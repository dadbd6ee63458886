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

// Preprocessing of trace rows into a dense processed matrix: z-scored numeric
// columns followed by one L2-normalised TF-IDF block per text column.

#ifndef EDYSEC_PREPROCESS_HPP_
#define EDYSEC_PREPROCESS_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "edysec/common.hpp"
#include "edysec/dataset.hpp"

namespace edysec {

struct ScalerParams {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> stddev;  // population (divide-by-n)

  bool operator==(const ScalerParams&) const = default;
};

inline ScalerParams FitScaler(const TraceDataset& train) {
  Require(!train.empty(), "scaler needs at least one training row");
  ScalerParams params;
  const auto& features = train.manifest.features;
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (features[f].kind != FeatureKind::kNumeric) continue;
    double sum = 0.0;
    for (const auto& row : train.rows) sum += std::get<double>(row.cells[f]);
    const double n = static_cast<double>(train.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& row : train.rows) {
      const double dev = std::get<double>(row.cells[f]) - mean;
      ss += dev * dev;
    }
    params.columns.push_back(features[f].name);
    params.mean.push_back(mean);
    params.stddev.push_back(std::sqrt(ss / n));
  }
  return params;
}

inline double ScaleValue(double x, double mean, double stddev) {
  return stddev > 0.0 ? (x - mean) / stddev : 0.0;
}

// Rows x numeric-columns block, columns in the manifest order of `ds`.
inline Matrix ApplyScaler(const ScalerParams& params, const TraceDataset& ds) {
  std::vector<std::pair<std::size_t, std::size_t>> map;  // (manifest idx, param idx)
  for (std::size_t f = 0; f < ds.manifest.features.size(); ++f) {
    const auto& col = ds.manifest.features[f];
    if (col.kind != FeatureKind::kNumeric) continue;
    auto it = std::find(params.columns.begin(), params.columns.end(), col.name);
    if (it == params.columns.end()) {
      throw Error(ErrorCode::kUnknownColumn, "scaler has no column '" + col.name + "'",
                  std::nullopt, col.name);
    }
    map.emplace_back(f, static_cast<std::size_t>(it - params.columns.begin()));
  }
  Matrix out(ds.size(), map.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < map.size(); ++c) {
      const auto [f, p] = map[c];
      out(r, c) = ScaleValue(std::get<double>(ds.rows[r].cells[f]), params.mean[p],
                             params.stddev[p]);
    }
  }
  return out;
}

// Lowercase alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct TextVectorizer {
  std::string column;
  FeatureKind kind = FeatureKind::kCategorical;
  std::size_t documents = 0;             // training rows seen at fit time
  std::vector<std::string> vocabulary;   // sorted
  std::vector<std::size_t> doc_freq;
  std::vector<double> idf;

  bool operator==(const TextVectorizer&) const = default;

  std::optional<std::size_t> IndexOf(std::string_view token) const {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), token);
    if (it == vocabulary.end() || *it != token) return std::nullopt;
    return static_cast<std::size_t>(it - vocabulary.begin());
  }
};

inline double SmoothIdf(std::size_t documents, std::size_t df) {
  return std::log((1.0 + static_cast<double>(documents)) / (1.0 + static_cast<double>(df))) + 1.0;
}

inline TextVectorizer FitTextVectorizer(const TraceDataset& train, std::string_view column) {
  auto idx = train.manifest.IndexOf(column);
  if (!idx) {
    throw Error(ErrorCode::kUnknownColumn, "no column '" + std::string(column) + "'",
                std::nullopt, std::string(column));
  }
  const auto& col = train.manifest.features[*idx];
  if (!IsTextKind(col.kind)) {
    throw Error(ErrorCode::kWrongKind, "column '" + col.name + "' is numeric", std::nullopt,
                col.name);
  }
  std::map<std::string, std::size_t> df;
  for (const auto& row : train.rows) {
    auto tokens = Tokenize(std::get<std::string>(row.cells[*idx]));
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  TextVectorizer vec;
  vec.column = col.name;
  vec.kind = col.kind;
  vec.documents = train.size();
  for (const auto& [token, count] : df) {
    vec.vocabulary.push_back(token);
    vec.doc_freq.push_back(count);
    vec.idf.push_back(SmoothIdf(vec.documents, count));
  }
  return vec;
}

using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Raw counts times idf, then L2-normalised; out-of-vocabulary tokens vanish.
inline SparseVector TransformText(const TextVectorizer& vec, std::string_view cell) {
  std::map<std::size_t, double> counts;
  for (const auto& token : Tokenize(cell)) {
    if (auto i = vec.IndexOf(token)) counts[*i] += 1.0;
  }
  SparseVector out;
  double norm_sq = 0.0;
  for (const auto& [i, count] : counts) {
    const double w = count * vec.idf[i];
    out.emplace_back(i, w);
    norm_sq += w * w;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& entry : out) entry.second *= inv;
  }
  return out;
}

struct ColumnOrigin {
  std::string feature;
  FeatureKind kind = FeatureKind::kNumeric;

  bool operator==(const ColumnOrigin&) const = default;
};

struct ProcessedMatrix {
  Matrix x;
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::vector<ColumnOrigin> column_map;  // one entry per processed column
  // Source features in manifest order; text features with an empty vocabulary
  // are listed here even though they own no processed column.
  std::vector<std::string> features;

  std::size_t rows() const { return x.rows; }
  std::size_t width() const { return x.cols; }
  bool operator==(const ProcessedMatrix&) const = default;
};

struct NumericBlock {
  std::vector<std::string> names;
  Matrix values;
};

struct TextBlock {
  std::string feature;
  FeatureKind kind = FeatureKind::kCategorical;
  std::size_t width = 0;
  std::vector<SparseVector> rows;
};

// `features` gives the source-feature order to record; when empty it is the
// numeric names followed by the text block names.
inline ProcessedMatrix Assemble(const NumericBlock& numeric, const std::vector<TextBlock>& text,
                                std::vector<std::string> features = {}) {
  Require(numeric.names.size() == numeric.values.cols, "numeric block names/width differ",
          ErrorCode::kRowMismatch);
  const std::size_t n = numeric.values.rows;
  std::size_t width = numeric.values.cols;
  for (const auto& block : text) {
    if (block.rows.size() != n) {
      throw Error(ErrorCode::kRowMismatch,
                  "text block '" + block.feature + "' has " + std::to_string(block.rows.size()) +
                      " rows, numeric block has " + std::to_string(n));
    }
    width += block.width;
  }
  ProcessedMatrix pm;
  pm.x = Matrix(n, width);
  for (const auto& name : numeric.names) pm.column_map.push_back({name, FeatureKind::kNumeric});
  for (const auto& block : text) {
    for (std::size_t k = 0; k < block.width; ++k) pm.column_map.push_back({block.feature, block.kind});
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto row = pm.x.Row(r);
    auto src = numeric.values.Row(r);
    std::copy(src.begin(), src.end(), row.begin());
    std::size_t base = numeric.values.cols;
    for (const auto& block : text) {
      for (const auto& [i, v] : block.rows[r]) row[base + i] = v;
      base += block.width;
    }
  }
  if (features.empty()) {
    features = numeric.names;
    for (const auto& block : text) features.push_back(block.feature);
  }
  pm.features = std::move(features);
  return pm;
}

// Fitted preprocessing state for one manifest.
struct Preprocessor {
  FeatureManifest manifest;
  ScalerParams scaler;
  std::vector<TextVectorizer> vectorizers;  // text columns in manifest order

  bool operator==(const Preprocessor&) const = default;

  static Preprocessor Fit(const TraceDataset& train) {
    Preprocessor p;
    p.manifest = train.manifest;
    p.scaler = FitScaler(train);
    for (const auto& col : train.manifest.features) {
      if (IsTextKind(col.kind)) p.vectorizers.push_back(FitTextVectorizer(train, col.name));
    }
    return p;
  }

  std::size_t Width() const {
    std::size_t w = scaler.columns.size();
    for (const auto& v : vectorizers) w += v.vocabulary.size();
    return w;
  }

  std::vector<ColumnOrigin> ColumnMap() const {
    std::vector<ColumnOrigin> map;
    for (const auto& c : scaler.columns) map.push_back({c, FeatureKind::kNumeric});
    for (const auto& v : vectorizers) {
      for (std::size_t k = 0; k < v.vocabulary.size(); ++k) map.push_back({v.column, v.kind});
    }
    return map;
  }

  ProcessedMatrix Transform(const TraceDataset& ds) const {
    Require(ds.manifest.features == manifest.features, "dataset manifest differs from fitted one",
            ErrorCode::kLayoutMismatch);
    NumericBlock numeric{scaler.columns, ApplyScaler(scaler, ds)};
    std::vector<TextBlock> text;
    for (const auto& vec : vectorizers) {
      const std::size_t f = *manifest.IndexOf(vec.column);
      TextBlock block{vec.column, vec.kind, vec.vocabulary.size(), {}};
      block.rows.reserve(ds.size());
      for (const auto& row : ds.rows) {
        block.rows.push_back(TransformText(vec, std::get<std::string>(row.cells[f])));
      }
      text.push_back(std::move(block));
    }
    ProcessedMatrix pm = Assemble(numeric, text, manifest.FeatureNames());
    for (const auto& row : ds.rows) {
      pm.labels.push_back(row.label);
      pm.ids.push_back(row.id);
    }
    return pm;
  }

  // Processes one record given cells aligned with the manifest.
  std::vector<double> TransformCells(const std::vector<Cell>& cells) const {
    Require(cells.size() == manifest.features.size(), "record width differs from manifest",
            ErrorCode::kWidthMismatch);
    std::vector<double> out(Width(), 0.0);
    std::size_t c = 0;
    for (std::size_t i = 0; i < scaler.columns.size(); ++i, ++c) {
      const std::size_t f = *manifest.IndexOf(scaler.columns[i]);
      out[c] = ScaleValue(std::get<double>(cells[f]), scaler.mean[i], scaler.stddev[i]);
    }
    for (const auto& vec : vectorizers) {
      const std::size_t f = *manifest.IndexOf(vec.column);
      for (const auto& [i, v] : TransformText(vec, std::get<std::string>(cells[f]))) out[c + i] = v;
      c += vec.vocabulary.size();
    }
    return out;
  }
};

// Source features and the processed columns each one owns.
struct FeatureGroups {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> columns;

  std::size_t size() const { return names.size(); }
};

inline FeatureGroups GroupsOf(const std::vector<std::string>& features,
                              const std::vector<ColumnOrigin>& column_map) {
  FeatureGroups g;
  g.names = features;
  g.columns.resize(features.size());
  std::map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < features.size(); ++i) at[features[i]] = i;
  for (std::size_t c = 0; c < column_map.size(); ++c) {
    auto it = at.find(column_map[c].feature);
    Require(it != at.end(), "column maps to unlisted feature '" + column_map[c].feature + "'",
            ErrorCode::kLayoutMismatch);
    g.columns[it->second].push_back(c);
  }
  return g;
}

inline FeatureGroups GroupsOf(const ProcessedMatrix& pm) {
  return GroupsOf(pm.features, pm.column_map);
}

}  // namespace edysec

#endif  // EDYSEC_PREPROCESS_HPP_
