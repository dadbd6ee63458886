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

// Run-to-run stability of model scores: mean, spread, percentile-bootstrap
// interval of the mean, tie-aware average ranks and a stability score.

#ifndef EDYSEC_STABILITY_HPP_
#define EDYSEC_STABILITY_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "edysec/common.hpp"

namespace edysec {

struct ScoreTable {
  std::vector<std::string> models;
  std::vector<std::string> configs;
  std::vector<std::vector<double>> scores;  // [model][config]

  void Validate() const {
    Require(!models.empty() && !configs.empty(), "score table needs models and configs");
    Require(scores.size() == models.size(), "score table row count differs from model count");
    for (const auto& row : scores) {
      Require(row.size() == configs.size(), "score table has missing cells");
    }
  }
};

inline double Mean(std::span<const double> xs) {
  Require(!xs.empty(), "mean of an empty list");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// sqrt(sum (x - mean)^2 / n).
inline double PopulationStd(std::span<const double> xs) {
  const double m = Mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

// sqrt(sum (x - mean)^2 / (n - 1)); zero for a single score.
inline double SampleStd(std::span<const double> xs) {
  const double m = Mean(xs);
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Linear-interpolation quantile of sorted data (positions q * (n - 1)).
inline double SortedQuantile(std::span<const double> sorted, double q) {
  Require(!sorted.empty(), "quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

inline Interval BootstrapCi(std::span<const double> scores, double level, std::size_t resamples,
                            std::uint64_t seed) {
  if (scores.size() < 2) throw Error(ErrorCode::kTooFewScores, "bootstrap needs >= 2 scores");
  Require(resamples >= 1000, "bootstrap needs >= 1000 resamples");
  Require(level > 0.0 && level < 1.0, "confidence level must lie in (0, 1)");
  Rng rng(DeriveSeed(seed, 0xb007u));
  std::vector<double> means(resamples);
  const std::size_t n = scores.size();
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += scores[rng.Index(n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {SortedQuantile(means, tail), SortedQuantile(means, 1.0 - tail)};
}

// Per config, rank 1 is the best score; ties share the mean of their spanned
// positions. Returns the across-config average per model.
inline std::vector<double> AverageRank(const ScoreTable& table) {
  table.Validate();
  const std::size_t m = table.models.size();
  std::vector<double> total(m, 0.0);
  std::vector<std::size_t> order(m);
  for (std::size_t c = 0; c < table.configs.size(); ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return table.scores[a][c] > table.scores[b][c];
    });
    for (std::size_t i = 0; i < m;) {
      std::size_t j = i;
      while (j < m && table.scores[order[j]][c] == table.scores[order[i]][c]) ++j;
      const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) total[order[k]] += rank;
      i = j;
    }
  }
  for (double& t : total) t /= static_cast<double>(table.configs.size());
  return total;
}

struct StabilityRow {
  std::string model;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double avg_rank = 0.0;
  double stability = 0.0;  // 1 - stddev
};

struct StabilityOptions {
  double level = 0.95;
  std::size_t resamples = 100000;
  std::uint64_t seed = 2025;
};

// Spread is the n-1 sample standard deviation; the interval falls back to
// the single score when a model has only one config.
inline std::vector<StabilityRow> StabilityReport(const ScoreTable& table,
                                                 const StabilityOptions& opts = {}) {
  table.Validate();
  const auto ranks = AverageRank(table);
  std::vector<StabilityRow> rows;
  for (std::size_t i = 0; i < table.models.size(); ++i) {
    const auto& s = table.scores[i];
    StabilityRow row;
    row.model = table.models[i];
    row.mean = Mean(s);
    row.stddev = SampleStd(s);
    row.stability = 1.0 - row.stddev;
    if (s.size() >= 2) {
      const auto ci = BootstrapCi(s, opts.level, opts.resamples, DeriveSeed(opts.seed, i));
      row.ci_low = ci.low;
      row.ci_high = ci.high;
    } else {
      row.ci_low = row.ci_high = row.mean;
    }
    row.avg_rank = ranks[i];
    rows.push_back(row);
  }
  // Means that differ only by summation rounding count as equal.
  std::stable_sort(rows.begin(), rows.end(), [](const StabilityRow& a, const StabilityRow& b) {
    if (std::abs(a.mean - b.mean) > 1e-12) return a.mean > b.mean;
    return a.avg_rank < b.avg_rank;
  });
  return rows;
}

}  // namespace edysec

#endif  // EDYSEC_STABILITY_HPP_
