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

// Model-agnostic attributions over source features. A feature is "absent"
// when its whole processed block is replaced by a background row's values
// (interventional masking); the coalition value is the mean model output over
// the background set.

#ifndef EDYSEC_EXPLAIN_HPP_
#define EDYSEC_EXPLAIN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edysec/common.hpp"
#include "edysec/preprocess.hpp"

namespace edysec {

// Maps a batch of processed rows to model outputs.
using BatchModel = std::function<std::vector<double>(const Matrix&)>;

struct Attribution {
  std::string method;
  std::vector<std::string> features;
  std::vector<double> phi;
  double base = 0.0;      // value of the empty coalition, E[f(X)]
  double fx = 0.0;        // model output on the instance
  double residual = 0.0;  // |base + sum(phi) - fx|

  double Sum() const { return std::accumulate(phi.begin(), phi.end(), 0.0); }
};

struct ExplainConfig {
  std::size_t background_rows = 100;
  std::uint64_t seed = 11;
  // Coalition budget for Kernel SHAP; unset means enumerate when d <= 14 and
  // sample 2048 coalitions otherwise.
  std::optional<std::size_t> shap_budget;
  std::size_t lime_perturbations = 5000;
  // Kernel width; unset means 0.75 * sqrt(d).
  std::optional<double> lime_kernel_width;
  // Surrogate features reported; unset or 0 keeps all.
  std::size_t lime_top_k = 0;
};

// Samples background rows without replacement (all rows when fewer exist).
inline Matrix SampleBackground(const Matrix& x, std::size_t count, std::uint64_t seed) {
  Require(x.rows > 0, "background source is empty");
  std::vector<std::size_t> idx(x.rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, 0xba5eu));
  rng.Shuffle(idx);
  idx.resize(std::min(count, x.rows));
  std::sort(idx.begin(), idx.end());
  Matrix out(idx.size(), x.cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = x.Row(idx[i]);
    std::copy(src.begin(), src.end(), out.Row(i).begin());
  }
  return out;
}

using Coalition = std::uint64_t;  // bit f set = feature f taken from x

// v(S) evaluator for one instance.
class CoalitionGame {
 public:
  CoalitionGame(BatchModel model, std::span<const double> x, const Matrix& background,
                const FeatureGroups& groups)
      : model_(std::move(model)), x_(x.begin(), x.end()), background_(background), groups_(groups) {
    Require(background.rows > 0, "background must be nonempty");
    if (background.cols != x.size()) {
      throw Error(ErrorCode::kWidthMismatch, "background width differs from instance width");
    }
    Require(groups.size() <= 63, "at most 63 source features supported");
    for (const auto& cols : groups.columns) {
      for (std::size_t c : cols) {
        Require(c < x.size(), "feature group refers past the instance width",
                ErrorCode::kLayoutMismatch);
      }
    }
  }

  std::size_t features() const { return groups_.size(); }
  Coalition Full() const {
    return features() == 64 ? ~Coalition{0} : ((Coalition{1} << features()) - 1);
  }

  std::vector<double> Values(const std::vector<Coalition>& coalitions) const {
    std::vector<double> out;
    out.reserve(coalitions.size());
    const std::size_t b = background_.rows;
    const std::size_t per_call = std::max<std::size_t>(1, 16384 / b);
    Matrix batch;
    for (std::size_t start = 0; start < coalitions.size(); start += per_call) {
      const std::size_t end = std::min(coalitions.size(), start + per_call);
      batch = Matrix((end - start) * b, x_.size());
      for (std::size_t k = start; k < end; ++k) {
        for (std::size_t r = 0; r < b; ++r) {
          auto row = batch.Row((k - start) * b + r);
          auto bg = background_.Row(r);
          std::copy(bg.begin(), bg.end(), row.begin());
          for (std::size_t f = 0; f < groups_.size(); ++f) {
            if (coalitions[k] >> f & 1) {
              for (std::size_t c : groups_.columns[f]) row[c] = x_[c];
            }
          }
        }
      }
      const auto y = model_(batch);
      Require(y.size() == batch.rows, "model returned the wrong number of outputs");
      for (std::size_t k = start; k < end; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < b; ++r) s += y[(k - start) * b + r];
        out.push_back(s / static_cast<double>(b));
      }
    }
    return out;
  }

  double Value(Coalition s) const { return Values({s}).front(); }

  // Model output on the instance itself (not averaged over background).
  double Output() const {
    Matrix single(1, x_.size());
    std::copy(x_.begin(), x_.end(), single.data.begin());
    return model_(single).front();
  }

  const FeatureGroups& groups() const { return groups_; }

 private:
  BatchModel model_;
  std::vector<double> x_;
  const Matrix& background_;
  const FeatureGroups& groups_;
};

inline int PopCount64(Coalition c) { return __builtin_popcountll(c); }

inline constexpr std::size_t kExactShapleyMaxFeatures = 12;
inline constexpr std::size_t kKernelEnumerateMaxFeatures = 14;

// Shapley values by enumerating every coalition.
inline Attribution ExactShapley(const BatchModel& model, std::span<const double> x,
                                const Matrix& background, const FeatureGroups& groups) {
  const std::size_t d = groups.size();
  if (d > kExactShapleyMaxFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                std::to_string(d) + " features exceed the exact-enumeration limit of " +
                    std::to_string(kExactShapleyMaxFeatures));
  }
  CoalitionGame game(model, x, background, groups);
  const std::size_t total = std::size_t{1} << d;
  std::vector<Coalition> all(total);
  std::iota(all.begin(), all.end(), Coalition{0});
  const auto v = game.Values(all);

  // weight[s] = s! (d - s - 1)! / d!
  std::vector<double> weight(d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    double w = 1.0 / static_cast<double>(d);
    // 1 / (d * C(d-1, s))
    double binom = 1.0;
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(d - 1 - s + k) / static_cast<double>(k);
    }
    weight[s] = w / binom;
  }
  Attribution a;
  a.method = "exact_shapley";
  a.features = groups.names;
  a.phi.assign(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    const Coalition bit = Coalition{1} << f;
    double phi = 0.0;
    for (Coalition s = 0; s < total; ++s) {
      if (s & bit) continue;
      phi += weight[static_cast<std::size_t>(PopCount64(s))] * (v[s | bit] - v[s]);
    }
    a.phi[f] = phi;
  }
  a.base = v[0];
  a.fx = v[total - 1];
  a.residual = std::abs(a.base + a.Sum() - a.fx);
  return a;
}

namespace detail {

inline double Binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

inline double ShapleyKernelWeight(std::size_t d, std::size_t s) {
  return static_cast<double>(d - 1) /
         (Binomial(d, s) * static_cast<double>(s) * static_cast<double>(d - s));
}

// min || sqrt(W) (A beta - t) ||, raising SingularSystem on rank deficiency.
inline Eigen::VectorXd SolveWeighted(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                                     const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd aw = sw.asDiagonal() * a;
  const Eigen::VectorXd tw = sw.asDiagonal() * t;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aw);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) {
    throw Error(ErrorCode::kSingularSystem,
                "coalition design is rank deficient; increase the sampling budget");
  }
  return qr.solve(tw);
}

}  // namespace detail

// Kernel SHAP: weighted least squares under the Shapley kernel with the
// empty/full coalitions imposed as exact constraints (the last feature's
// value is eliminated through the efficiency identity).
inline Attribution KernelShap(const BatchModel& model, std::span<const double> x,
                              const Matrix& background, const FeatureGroups& groups,
                              const ExplainConfig& cfg = {}) {
  const std::size_t d = groups.size();
  Require(d >= 2, "Kernel SHAP needs at least two features");
  CoalitionGame game(model, x, background, groups);
  const Coalition full = game.Full();

  std::vector<Coalition> coalitions;
  std::vector<double> weights;
  const double enumerable = std::ldexp(1.0, static_cast<int>(d)) - 2.0;
  const bool enumerate = cfg.shap_budget ? enumerable <= static_cast<double>(*cfg.shap_budget)
                                         : d <= kKernelEnumerateMaxFeatures;
  if (enumerate) {
    for (Coalition s = 1; s < full; ++s) {
      coalitions.push_back(s);
      weights.push_back(detail::ShapleyKernelWeight(d, static_cast<std::size_t>(PopCount64(s))));
    }
  } else {
    const std::size_t budget = std::max<std::size_t>(cfg.shap_budget.value_or(2048), 2 * d);
    // Size distribution proportional to the kernel mass of each size; each
    // draw is paired with its complement and both carry unit weight.
    std::vector<double> size_mass(d, 0.0);
    double total_mass = 0.0;
    for (std::size_t s = 1; s < d; ++s) {
      size_mass[s] = static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
      total_mass += size_mass[s];
    }
    Rng rng(DeriveSeed(cfg.seed, 0x5ba9u));
    std::vector<std::size_t> idx(d);
    while (coalitions.size() + 2 <= budget) {
      double u = rng.Uniform() * total_mass;
      std::size_t size = 1;
      while (size < d - 1 && u >= size_mass[size]) {
        u -= size_mass[size];
        ++size;
      }
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      Coalition s = 0;
      for (std::size_t k = 0; k < size; ++k) {
        std::swap(idx[k], idx[k + rng.Index(d - k)]);
        s |= Coalition{1} << idx[k];
      }
      coalitions.push_back(s);
      coalitions.push_back(full & ~s);
      weights.push_back(1.0);
      weights.push_back(1.0);
    }
  }

  const double base = game.Value(0);
  const double fx = game.Value(full);
  const auto values = game.Values(coalitions);
  const double delta = fx - base;
  const std::size_t m = coalitions.size();
  const std::size_t last = d - 1;
  Eigen::MatrixXd a(m, d - 1);
  Eigen::VectorXd t(m), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z_last = static_cast<double>(coalitions[i] >> last & 1);
    for (std::size_t j = 0; j < last; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(coalitions[i] >> j & 1) - z_last;
    }
    t(static_cast<Eigen::Index>(i)) = values[i] - base - z_last * delta;
    w(static_cast<Eigen::Index>(i)) = weights[i];
  }
  const Eigen::VectorXd beta = detail::SolveWeighted(a, t, w);

  Attribution out;
  out.method = enumerate ? "kernel_shap" : "kernel_shap_sampled";
  out.features = groups.names;
  out.phi.resize(d);
  double partial = 0.0;
  for (std::size_t j = 0; j < last; ++j) {
    out.phi[j] = beta(static_cast<Eigen::Index>(j));
    partial += out.phi[j];
  }
  out.phi[last] = delta - partial;
  out.base = base;
  out.fx = fx;
  out.residual = std::abs(out.base + out.Sum() - out.fx);
  return out;
}

// Local linear surrogate on the binary presence design. Masked features take
// the values of one randomly drawn background row per perturbation.
inline Attribution LimeExplain(const BatchModel& model, std::span<const double> x,
                               const Matrix& background, const FeatureGroups& groups,
                               const ExplainConfig& cfg = {}) {
  const std::size_t d = groups.size();
  Require(d >= 1, "LIME needs at least one feature");
  Require(cfg.lime_perturbations >= 10 * d, "LIME needs at least 10 perturbations per feature");
  Require(background.rows > 0 && background.cols == x.size(), "background must match the instance",
          ErrorCode::kWidthMismatch);
  const double width = cfg.lime_kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(d)));
  Require(width > 0.0, "kernel width must be positive");

  Rng rng(DeriveSeed(cfg.seed, 0x11e3u));
  const std::size_t n = cfg.lime_perturbations;
  Matrix samples(n, x.size());
  std::vector<std::vector<std::uint8_t>> present(n, std::vector<std::uint8_t>(d, 1));
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = samples.Row(i);
    std::copy(x.begin(), x.end(), row.begin());
    // The first sample is the instance itself.
    const std::size_t masked = i == 0 ? 0 : rng.Index(d + 1);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < masked; ++k) std::swap(idx[k], idx[k + rng.Index(d - k)]);
    if (masked > 0) {
      auto bg = background.Row(rng.Index(background.rows));
      for (std::size_t k = 0; k < masked; ++k) {
        present[i][idx[k]] = 0;
        for (std::size_t c : groups.columns[idx[k]]) row[c] = bg[c];
      }
    }
  }
  const auto y = model(samples);
  Require(y.size() == n, "model returned the wrong number of outputs");

  Eigen::MatrixXd a(n, d + 1);
  Eigen::VectorXd t(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, 0) = 1.0;
    std::size_t masked = 0;
    for (std::size_t j = 0; j < d; ++j) {
      a(ii, static_cast<Eigen::Index>(j + 1)) = present[i][j];
      masked += present[i][j] == 0;
    }
    const double dist = static_cast<double>(masked) / static_cast<double>(d);
    w(ii) = std::exp(-(dist * dist) / (width * width));
    t(ii) = y[i];
  }
  const Eigen::VectorXd beta = detail::SolveWeighted(a, t, w);

  Attribution out;
  out.method = "lime";
  out.features = groups.names;
  out.base = beta(0);
  out.phi.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.phi[j] = beta(static_cast<Eigen::Index>(j + 1));
  if (cfg.lime_top_k > 0 && cfg.lime_top_k < d) {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
      return std::abs(out.phi[p]) > std::abs(out.phi[q]);
    });
    for (std::size_t k = cfg.lime_top_k; k < d; ++k) out.phi[order[k]] = 0.0;
  }
  out.fx = y[0];
  out.residual = std::abs(out.base + out.Sum() - out.fx);
  return out;
}

struct Importance {
  std::string feature;
  double value = 0.0;
};

// Mean absolute attribution per feature, in the attributions' feature order.
inline std::vector<Importance> GlobalImportance(const std::vector<Attribution>& attributions) {
  Require(!attributions.empty(), "no attributions to aggregate");
  const auto& names = attributions.front().features;
  std::vector<double> total(names.size(), 0.0);
  for (const auto& a : attributions) {
    if (a.features != names || a.phi.size() != names.size()) {
      throw Error(ErrorCode::kFeatureMismatch, "attributions cover different feature sets");
    }
    for (std::size_t f = 0; f < names.size(); ++f) total[f] += std::abs(a.phi[f]);
  }
  std::vector<Importance> out;
  for (std::size_t f = 0; f < names.size(); ++f) {
    out.push_back({names[f], total[f] / static_cast<double>(attributions.size())});
  }
  return out;
}

// Descending importance, ties by feature name.
inline std::vector<std::string> ExplanationRanking(const std::vector<Importance>& importance) {
  Require(!importance.empty(), "importance map is empty");
  std::vector<Importance> sorted = importance;
  std::sort(sorted.begin(), sorted.end(), [](const Importance& a, const Importance& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.feature < b.feature;
  });
  std::vector<std::string> out;
  for (const auto& i : sorted) out.push_back(i.feature);
  return out;
}

struct Overlap {
  std::vector<std::string> common;  // sorted
  double jaccard = 0.0;
};

// Intersection of the selected set with the top-k ranked features; k defaults
// to the size of the selected set.
inline Overlap SelectionOverlap(const std::vector<std::string>& selected,
                                const std::vector<std::string>& ranking,
                                std::optional<std::size_t> k = std::nullopt) {
  const std::size_t top = k.value_or(selected.size());
  Require(top <= ranking.size(), "k exceeds the ranking length");
  std::set<std::string> chosen(selected.begin(), selected.end());
  std::set<std::string> head(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(top));
  Overlap o;
  std::set_intersection(chosen.begin(), chosen.end(), head.begin(), head.end(),
                        std::back_inserter(o.common));
  std::vector<std::string> both;
  std::set_union(chosen.begin(), chosen.end(), head.begin(), head.end(),
                 std::back_inserter(both));
  o.jaccard = both.empty() ? 1.0 : static_cast<double>(o.common.size()) /
                                       static_cast<double>(both.size());
  return o;
}

// Contributions ordered by |phi| descending (ties by name), for waterfall-style
// reports.
inline std::vector<std::pair<std::string, double>> OrderedContributions(const Attribution& a,
                                                                         std::size_t limit = 0) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t f = 0; f < a.features.size(); ++f) out.emplace_back(a.features[f], a.phi[f]);
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) {
    if (std::abs(p.second) != std::abs(q.second)) return std::abs(p.second) > std::abs(q.second);
    return p.first < q.first;
  });
  if (limit > 0 && out.size() > limit) out.resize(limit);
  return out;
}

}  // namespace edysec

#endif  // EDYSEC_EXPLAIN_HPP_
