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

#ifndef EDYSEC_METRICS_HPP_
#define EDYSEC_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "edysec/common.hpp"

namespace edysec {

// Malicious (label 1) is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double error_rate = 0.0;
  double auc = 0.0;
};

inline constexpr double kDefaultThreshold = 0.5;

// Predicts malicious iff p >= threshold.
inline ConfusionMatrix Confusion(std::span<const int> labels, std::span<const double> probabilities,
                                 double threshold = kDefaultThreshold) {
  if (labels.size() != probabilities.size() || labels.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and probabilities must align and be nonempty");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probabilities[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++cm.tp : ++cm.fn;
    } else {
      predicted ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

inline MetricsReport ClassificationMetrics(const ConfusionMatrix& cm) {
  Require(cm.total() > 0, "confusion matrix is empty");
  auto ratio = [](std::uint64_t num, std::uint64_t den, double when_empty) {
    return den == 0 ? when_empty : static_cast<double>(num) / static_cast<double>(den);
  };
  MetricsReport m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total(), 0.0);
  m.precision = ratio(cm.tp, cm.tp + cm.fp, 1.0);
  m.recall = ratio(cm.tp, cm.tp + cm.fn, 1.0);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.fpr = ratio(cm.fp, cm.fp + cm.tn, 0.0);
  m.fnr = ratio(cm.fn, cm.fn + cm.tp, 0.0);
  m.error_rate = 1.0 - m.accuracy;
  return m;
}

// Mann-Whitney statistic with mid-ranks for ties. The numerator is a
// half-integer and therefore exact in double precision.
inline double RocAuc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and scores must align");
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kSingleClass, "AUC needs both classes present");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

inline MetricsReport Evaluate(std::span<const int> labels, std::span<const double> probabilities,
                              double threshold = kDefaultThreshold) {
  MetricsReport m = ClassificationMetrics(Confusion(labels, probabilities, threshold));
  const bool both = std::find(labels.begin(), labels.end(), 0) != labels.end() &&
                    std::find(labels.begin(), labels.end(), 1) != labels.end();
  m.auc = both ? RocAuc(labels, probabilities) : 0.0;
  return m;
}

inline double Accuracy(std::span<const int> labels, std::span<const double> probabilities,
                       double threshold = kDefaultThreshold) {
  return ClassificationMetrics(Confusion(labels, probabilities, threshold)).accuracy;
}

}  // namespace edysec

#endif  // EDYSEC_METRICS_HPP_
