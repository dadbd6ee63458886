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

// Feature selection at source-feature granularity: ANOVA F ranking,
// correlation filtering, permutation importance, binary PSO and binary WOA,
// plus the accuracy/compactness objective used to pick among them.

#ifndef EDYSEC_FEATSEL_HPP_
#define EDYSEC_FEATSEL_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edysec/common.hpp"
#include "edysec/metrics.hpp"
#include "edysec/neuralnet.hpp"
#include "edysec/preprocess.hpp"

namespace edysec {

enum class SelectorMethod { kAnova, kCorr, kImportance, kPso, kWoa };

inline std::string_view MethodName(SelectorMethod m) {
  switch (m) {
    case SelectorMethod::kAnova: return "anova";
    case SelectorMethod::kCorr: return "corr";
    case SelectorMethod::kImportance: return "importance";
    case SelectorMethod::kPso: return "pso";
    case SelectorMethod::kWoa: return "woa";
  }
  return "anova";
}

inline SelectorMethod ParseMethod(std::string_view name) {
  for (auto m : {SelectorMethod::kAnova, SelectorMethod::kCorr, SelectorMethod::kImportance,
                 SelectorMethod::kPso, SelectorMethod::kWoa}) {
    if (MethodName(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown selector '" + std::string(name) + "'");
}

struct SelectorResult {
  SelectorMethod method = SelectorMethod::kAnova;
  std::vector<std::string> selected;  // source features, manifest order
  double score = 0.0;                 // validation accuracy of the baseline
  double objective = 0.0;
  double wall_seconds = 0.0;

  std::size_t size() const { return selected.size(); }
};

// J = alpha * P + (1 - alpha) * (1 - d_j / d_total).
inline double Objective(double score, std::size_t d_selected, std::size_t d_total, double alpha) {
  Require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  Require(d_selected >= 1 && d_selected <= d_total, "need 1 <= d_j <= d_total");
  return alpha * score +
         (1.0 - alpha) * (1.0 - static_cast<double>(d_selected) / static_cast<double>(d_total));
}

// Maximal objective; ties go to fewer features, then to method order.
inline SelectorResult ChooseSelector(const std::vector<SelectorResult>& results) {
  Require(!results.empty(), "no selector results to choose from");
  const SelectorResult* best = &results.front();
  for (const auto& r : results) {
    if (r.objective > best->objective ||
        (r.objective == best->objective &&
         (r.size() < best->size() || (r.size() == best->size() && r.method < best->method)))) {
      best = &r;
    }
  }
  return *best;
}

// Keeps the processed columns owned by `selected`, preserving their order.
inline ProcessedMatrix Project(const ProcessedMatrix& pm, const std::vector<std::string>& selected) {
  std::set<std::string> wanted(selected.begin(), selected.end());
  for (const auto& name : wanted) {
    if (std::find(pm.features.begin(), pm.features.end(), name) == pm.features.end()) {
      throw Error(ErrorCode::kUnknownFeature, "no source feature '" + name + "'", std::nullopt,
                  name);
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < pm.column_map.size(); ++c) {
    if (wanted.count(pm.column_map[c].feature)) keep.push_back(c);
  }
  ProcessedMatrix out;
  out.labels = pm.labels;
  out.ids = pm.ids;
  for (const auto& f : pm.features) {
    if (wanted.count(f)) out.features.push_back(f);
  }
  for (std::size_t c : keep) out.column_map.push_back(pm.column_map[c]);
  out.x = Matrix(pm.rows(), keep.size());
  for (std::size_t r = 0; r < pm.rows(); ++r) {
    auto src = pm.x.Row(r);
    auto dst = out.x.Row(r);
    for (std::size_t k = 0; k < keep.size(); ++k) dst[k] = src[keep[k]];
  }
  return out;
}

// One scalar per source feature per row: the value itself for single-column
// features, the L2 norm of the block otherwise. Rows x features.
inline Matrix FeatureSummaries(const ProcessedMatrix& pm) {
  const FeatureGroups groups = GroupsOf(pm);
  Matrix out(pm.rows(), groups.size());
  for (std::size_t r = 0; r < pm.rows(); ++r) {
    auto row = pm.x.Row(r);
    for (std::size_t f = 0; f < groups.size(); ++f) {
      const auto& cols = groups.columns[f];
      const bool numeric = cols.size() == 1 && pm.column_map[cols[0]].kind == FeatureKind::kNumeric;
      if (numeric) {
        out(r, f) = row[cols[0]];
      } else {
        double s = 0.0;
        for (std::size_t c : cols) s += row[c] * row[c];
        out(r, f) = std::sqrt(s);
      }
    }
  }
  return out;
}

// Spread at rounding level. The L2 norm of a normalised text block is 1 up
// to an ulp, which would otherwise read as a perfectly separating feature.
inline bool NearlyConstant(std::span<const double> v) {
  if (v.empty()) return true;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-12 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
}

// One-way two-group F statistic. Equal means give exactly 0, as does a fully
// degenerate column; zero within-group spread with distinct means is +inf.
inline double TwoGroupF(std::span<const double> values, std::span<const int> labels) {
  double sum[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum[labels[i]] += values[i];
    ++count[labels[i]];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw Error(ErrorCode::kSingleClass, "ANOVA needs both classes present");
  }
  if (NearlyConstant(values)) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean[2] = {sum[0] / static_cast<double>(count[0]),
                          sum[1] / static_cast<double>(count[1])};
  const double grand = (sum[0] + sum[1]) / n;
  double ssw = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean[labels[i]];
    ssw += d * d;
  }
  if (mean[0] == mean[1]) return 0.0;
  double ssb = 0.0;
  for (int k = 0; k < 2; ++k) {
    ssb += static_cast<double>(count[k]) * (mean[k] - grand) * (mean[k] - grand);
  }
  if (ssb == 0.0) return 0.0;
  if (n <= 2.0 || ssw == 0.0) return std::numeric_limits<double>::infinity();
  return (ssb / 1.0) / (ssw / (n - 2.0));
}

struct FeatureScore {
  std::string feature;
  double value = 0.0;
};

inline std::vector<FeatureScore> AnovaFScores(const ProcessedMatrix& pm) {
  const Matrix summary = FeatureSummaries(pm);
  std::vector<FeatureScore> scores;
  std::vector<double> column(pm.rows());
  for (std::size_t f = 0; f < pm.features.size(); ++f) {
    for (std::size_t r = 0; r < pm.rows(); ++r) column[r] = summary(r, f);
    scores.push_back({pm.features[f], TwoGroupF(column, pm.labels)});
  }
  return scores;
}

// Indices of `scores` sorted by descending value, stable in input order.
inline std::vector<std::size_t> RankDescending(const std::vector<FeatureScore>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].value > scores[b].value; });
  return order;
}

// Restores manifest order (the order of `scores`) for a chosen index set.
inline std::vector<std::string> InInputOrder(const std::vector<FeatureScore>& scores,
                                             std::vector<std::size_t> chosen) {
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::string> out;
  for (std::size_t i : chosen) out.push_back(scores[i].feature);
  return out;
}

inline SelectorResult SelectAnova(const std::vector<FeatureScore>& scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw Error(ErrorCode::kBadK, "k=" + std::to_string(k) + " outside [1, " +
                                      std::to_string(scores.size()) + "]");
  }
  auto order = RankDescending(scores);
  order.resize(k);
  return {SelectorMethod::kAnova, InInputOrder(scores, std::move(order))};
}

inline double Pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  if (NearlyConstant(a) || NearlyConstant(b)) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;  // constant column
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Relevance filter on |point-biserial r|, then a redundancy pass that visits
// survivors from most to least relevant and drops any whose |r| with an
// already kept feature exceeds redundancy_max.
inline SelectorResult SelectCorr(const ProcessedMatrix& pm, double relevance_min,
                                 double redundancy_max) {
  Require(relevance_min >= 0.0 && relevance_min <= 1.0 && redundancy_max >= 0.0 &&
              redundancy_max <= 1.0,
          "correlation thresholds must lie in [0, 1]");
  const Matrix summary = FeatureSummaries(pm);
  const std::size_t d = pm.features.size();
  std::vector<std::vector<double>> columns(d, std::vector<double>(pm.rows()));
  for (std::size_t r = 0; r < pm.rows(); ++r) {
    for (std::size_t f = 0; f < d; ++f) columns[f][r] = summary(r, f);
  }
  std::vector<double> y(pm.labels.begin(), pm.labels.end());
  std::vector<FeatureScore> relevance;
  for (std::size_t f = 0; f < d; ++f) {
    relevance.push_back({pm.features[f], std::abs(Pearson(columns[f], y))});
  }
  std::vector<std::size_t> kept;
  for (std::size_t f : RankDescending(relevance)) {
    if (relevance[f].value < relevance_min) continue;
    bool redundant = false;
    for (std::size_t k : kept) {
      if (std::abs(Pearson(columns[f], columns[k])) > redundancy_max) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(f);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyResult, "no feature passes the correlation thresholds");
  }
  return {SelectorMethod::kCorr, InInputOrder(relevance, std::move(kept))};
}

// Mean accuracy drop when one feature's whole processed block is permuted
// across rows; the model is held fixed.
inline std::vector<FeatureScore> PermutationImportance(const NetworkParams& model,
                                                       const ProcessedMatrix& pm,
                                                       std::size_t repeats, std::uint64_t seed) {
  if (model.spec.input_width != pm.width()) {
    throw Error(ErrorCode::kLayoutMismatch, "model width differs from the matrix layout");
  }
  Require(repeats >= 1, "need at least one permutation repeat");
  const FeatureGroups groups = GroupsOf(pm);
  const double base = Accuracy(pm.labels, PredictProba(model, pm.x));
  std::vector<FeatureScore> out;
  Matrix work = pm.x;
  std::vector<std::size_t> perm(pm.rows());
  for (std::size_t f = 0; f < groups.size(); ++f) {
    double drop = 0.0;
    Rng rng(DeriveSeed(seed, 0x9e4u, f));
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.Shuffle(perm);
      for (std::size_t r = 0; r < pm.rows(); ++r) {
        for (std::size_t c : groups.columns[f]) work(r, c) = pm.x(perm[r], c);
      }
      drop += base - Accuracy(pm.labels, PredictProba(model, work));
    }
    for (std::size_t r = 0; r < pm.rows(); ++r) {
      for (std::size_t c : groups.columns[f]) work(r, c) = pm.x(r, c);
    }
    out.push_back({groups.names[f], drop / static_cast<double>(repeats)});
  }
  return out;
}

inline SelectorResult SelectImportance(const std::vector<FeatureScore>& importances,
                                       double threshold_fraction) {
  Require(threshold_fraction > 0.0 && threshold_fraction <= 1.0,
          "threshold fraction must lie in (0, 1]");
  double max_importance = -std::numeric_limits<double>::infinity();
  for (const auto& s : importances) max_importance = std::max(max_importance, s.value);
  if (importances.empty() || !(max_importance > 0.0)) {
    throw Error(ErrorCode::kEmptyResult, "no feature has positive importance");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < importances.size(); ++i) {
    if (importances[i].value >= threshold_fraction * max_importance) kept.push_back(i);
  }
  return {SelectorMethod::kImportance, InInputOrder(importances, std::move(kept))};
}

using FeatureMask = std::vector<std::uint8_t>;
using MaskFitness = std::function<double(const FeatureMask&)>;

struct SwarmConfig {
  std::size_t population = 20;
  std::size_t iterations = 50;
  std::uint64_t seed = 7;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  double v_max = 6.0;
  double spiral_b = 1.0;

  void Validate() const {
    Require(population >= 2, "swarm population must be >= 2");
    Require(iterations >= 1, "swarm iterations must be >= 1");
    Require(v_max > 0.0, "v_max must be > 0");
  }
};

struct SwarmResult {
  FeatureMask mask;
  double fitness = 0.0;
  // Best fitness after initialisation and after every iteration.
  std::vector<double> best_history;
  std::size_t evaluations = 0;
};

inline std::size_t PopCount(const FeatureMask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

namespace detail {

inline void RepairMask(FeatureMask& mask, Rng& rng) {
  if (PopCount(mask) == 0) mask[rng.Index(mask.size())] = 1;
}

// Sigmoid transfer: bit is set with probability 1 / (1 + e^-v).
inline void SampleBits(const std::vector<double>& v, FeatureMask& mask, Rng& rng) {
  for (std::size_t j = 0; j < v.size(); ++j) mask[j] = rng.Uniform() < Sigmoid(v[j]) ? 1 : 0;
  RepairMask(mask, rng);
}

// Leader position with each coordinate's sign flipped to agree with the bit
// that was actually sampled, so whales converge on the mask that scored.
inline std::vector<double> AnchorToMask(const std::vector<double>& x, const FeatureMask& mask) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = mask[j] ? std::abs(x[j]) : -std::abs(x[j]);
  return out;
}

}  // namespace detail

inline SwarmResult SelectBpso(const MaskFitness& fitness, std::size_t d_source,
                              const SwarmConfig& cfg) {
  Require(d_source >= 1, "need at least one source feature");
  cfg.Validate();
  const std::size_t n = cfg.population;
  std::vector<Rng> rngs;
  for (std::size_t a = 0; a < n; ++a) rngs.emplace_back(DeriveSeed(cfg.seed, 0xb950u, a));

  std::vector<FeatureMask> x(n, FeatureMask(d_source));
  std::vector<std::vector<double>> v(n, std::vector<double>(d_source));
  std::vector<FeatureMask> pbest(n);
  std::vector<double> pbest_fit(n);
  SwarmResult result;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 0; j < d_source; ++j) {
      x[a][j] = rngs[a].Uniform() < 0.5 ? 1 : 0;
      v[a][j] = rngs[a].Uniform(-cfg.v_max, cfg.v_max);
    }
    detail::RepairMask(x[a], rngs[a]);
    pbest[a] = x[a];
    pbest_fit[a] = fitness(x[a]);
    ++result.evaluations;
    if (a == 0 || pbest_fit[a] > result.fitness) {
      result.fitness = pbest_fit[a];
      result.mask = x[a];
    }
  }
  result.best_history.push_back(result.fitness);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double frac = cfg.iterations > 1 ? static_cast<double>(it) /
                                                 static_cast<double>(cfg.iterations - 1)
                                           : 0.0;
    const double w = cfg.inertia_start + (cfg.inertia_end - cfg.inertia_start) * frac;
    const FeatureMask gbest = result.mask;
    for (std::size_t a = 0; a < n; ++a) {
      Rng& rng = rngs[a];
      for (std::size_t j = 0; j < d_source; ++j) {
        const double r1 = rng.Uniform();
        const double r2 = rng.Uniform();
        double vel = w * v[a][j] +
                     cfg.c1 * r1 * (static_cast<double>(pbest[a][j]) - static_cast<double>(x[a][j])) +
                     cfg.c2 * r2 * (static_cast<double>(gbest[j]) - static_cast<double>(x[a][j]));
        v[a][j] = std::clamp(vel, -cfg.v_max, cfg.v_max);
      }
      detail::SampleBits(v[a], x[a], rng);
      const double f = fitness(x[a]);
      ++result.evaluations;
      if (f > pbest_fit[a]) {
        pbest_fit[a] = f;
        pbest[a] = x[a];
      }
      if (f > result.fitness) {
        result.fitness = f;
        result.mask = x[a];
      }
    }
    result.best_history.push_back(result.fitness);
  }
  return result;
}

// Agents move in a continuous space clamped to [-v_max, v_max]; each position
// is binarised through the same sigmoid transfer as the PSO selector.
inline SwarmResult SelectBwoa(const MaskFitness& fitness, std::size_t d_source,
                              const SwarmConfig& cfg) {
  Require(d_source >= 1, "need at least one source feature");
  cfg.Validate();
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const std::size_t n = cfg.population;
  std::vector<Rng> rngs;
  for (std::size_t a = 0; a < n; ++a) rngs.emplace_back(DeriveSeed(cfg.seed, 0x3a0au, a));

  std::vector<std::vector<double>> pos(n, std::vector<double>(d_source));
  std::vector<FeatureMask> masks(n, FeatureMask(d_source));
  SwarmResult result;
  std::vector<double> best_pos;
  for (std::size_t a = 0; a < n; ++a) {
    for (double& p : pos[a]) p = rngs[a].Uniform(-cfg.v_max, cfg.v_max);
    detail::SampleBits(pos[a], masks[a], rngs[a]);
    const double f = fitness(masks[a]);
    ++result.evaluations;
    if (a == 0 || f > result.fitness) {
      result.fitness = f;
      result.mask = masks[a];
      best_pos = detail::AnchorToMask(pos[a], masks[a]);
    }
  }
  result.best_history.push_back(result.fitness);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double a_coef =
        2.0 - 2.0 * static_cast<double>(it) / static_cast<double>(cfg.iterations);
    const std::vector<double> leader = best_pos;
    for (std::size_t a = 0; a < n; ++a) {
      Rng& rng = rngs[a];
      const double p = rng.Uniform();
      std::vector<double>& x = pos[a];
      if (p < 0.5) {
        const double big_a = 2.0 * a_coef * rng.Uniform() - a_coef;
        const double big_c = 2.0 * rng.Uniform();
        const std::vector<double>* target = &leader;
        if (std::abs(big_a) >= 1.0) {
          std::size_t other = rng.Index(n - 1);
          if (other >= a) ++other;
          target = &pos[other];
        }
        for (std::size_t j = 0; j < d_source; ++j) {
          const double dist = std::abs(big_c * (*target)[j] - x[j]);
          x[j] = (*target)[j] - big_a * dist;
        }
      } else {
        const double l = rng.Uniform(-1.0, 1.0);
        const double factor = std::exp(cfg.spiral_b * l) * std::cos(kTwoPi * l);
        for (std::size_t j = 0; j < d_source; ++j) {
          const double dist = std::abs(leader[j] - x[j]);
          x[j] = dist * factor + leader[j];
        }
      }
      for (double& xj : x) xj = std::clamp(xj, -cfg.v_max, cfg.v_max);
      detail::SampleBits(x, masks[a], rng);
      const double f = fitness(masks[a]);
      ++result.evaluations;
      if (f > result.fitness) {
        result.fitness = f;
        result.mask = masks[a];
        best_pos = detail::AnchorToMask(x, masks[a]);
      }
    }
    result.best_history.push_back(result.fitness);
  }
  return result;
}

inline std::vector<std::string> MaskToFeatures(const FeatureMask& mask,
                                               const std::vector<std::string>& features) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j]) out.push_back(features[j]);
  }
  return out;
}

// Scores feature subsets with the baseline network: train on the projected
// training matrix, report validation accuracy. Results are cached per mask.
class SubsetEvaluator {
 public:
  SubsetEvaluator(const ProcessedMatrix& train, const ProcessedMatrix& validation,
                  TrainConfig baseline_cfg, double alpha)
      : train_(train), validation_(validation), cfg_(std::move(baseline_cfg)), alpha_(alpha) {
    Require(train.features == validation.features, "train/validation layouts differ",
            ErrorCode::kLayoutMismatch);
  }

  const std::vector<std::string>& features() const { return train_.features; }
  double alpha() const { return alpha_; }
  std::size_t trainings() const { return trainings_; }

  double Score(const std::vector<std::string>& selected) {
    FeatureMask mask(train_.features.size(), 0);
    for (std::size_t j = 0; j < train_.features.size(); ++j) {
      mask[j] = std::find(selected.begin(), selected.end(), train_.features[j]) != selected.end();
    }
    return Score(mask);
  }

  double Score(const FeatureMask& mask) {
    if (auto it = cache_.find(mask); it != cache_.end()) return it->second;
    const auto selected = MaskToFeatures(mask, train_.features);
    const ProcessedMatrix tr = Project(train_, selected);
    const ProcessedMatrix vd = Project(validation_, selected);
    double score = 0.0;
    if (tr.width() == 0) {
      // Blocks without vocabulary carry no signal; predict the majority class.
      const double ones = static_cast<double>(std::count(tr.labels.begin(), tr.labels.end(), 1));
      const double p = ones * 2.0 >= static_cast<double>(tr.rows()) ? 1.0 : 0.0;
      std::vector<double> probs(vd.rows(), p);
      score = vd.rows() ? Accuracy(vd.labels, probs) : 0.0;
    } else {
      auto trained = Train(NetworkSpec::Baseline(tr.width()), cfg_, tr.x, tr.labels);
      ++trainings_;
      score = Accuracy(vd.labels, PredictProba(trained.params, vd.x));
    }
    cache_.emplace(mask, score);
    return score;
  }

  double Fitness(const FeatureMask& mask) {
    return Objective(Score(mask), PopCount(mask), mask.size(), alpha_);
  }

  // Fills score/objective of a selector result.
  void Complete(SelectorResult& r) {
    r.score = Score(r.selected);
    r.objective = Objective(r.score, r.selected.size(), train_.features.size(), alpha_);
  }

 private:
  const ProcessedMatrix& train_;
  const ProcessedMatrix& validation_;
  TrainConfig cfg_;
  double alpha_;
  std::map<FeatureMask, double> cache_;
  std::size_t trainings_ = 0;
};

}  // namespace edysec

#endif  // EDYSEC_FEATSEL_HPP_
