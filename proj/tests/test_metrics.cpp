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

#include "edysec/metrics.hpp"
#include "test_util.hpp"

namespace edysec {
namespace {

TEST(Confusion, ThresholdIsInclusive) {
  const std::vector<int> y = {1, 1, 0, 0, 1};
  const std::vector<double> p = {0.5, 0.49, 0.5, 0.1, 0.9};
  const auto cm = Confusion(y, p);
  EXPECT_EQ(cm, (ConfusionMatrix{2, 1, 1, 1}));
  EXPECT_EQ(Confusion(y, p, 0.95), (ConfusionMatrix{0, 2, 0, 3}));
}

TEST(Confusion, LengthMismatch) {
  const std::vector<int> y = {1, 0};
  const std::vector<double> p = {0.5};
  EXPECT_EDYSEC_ERROR(Confusion(y, p), ErrorCode::kLengthMismatch);
}

TEST(ClassificationMetrics, PublishedMlpCounts) {
  const auto m = ClassificationMetrics({1066, 1058, 6, 11});
  EXPECT_NEAR(m.fpr, 6.0 / 1064.0, 1e-15);
  EXPECT_NEAR(m.fnr, 11.0 / 1077.0, 1e-15);
  EXPECT_EQ(FormatFixed(100 * m.fpr, 2), "0.56");
  EXPECT_EQ(FormatFixed(100 * m.fnr, 2), "1.02");
  EXPECT_NEAR(m.accuracy, 2124.0 / 2141.0, 1e-15);
  EXPECT_NEAR(m.error_rate, 17.0 / 2141.0, 1e-15);
  EXPECT_NEAR(m.f1, 2.0 * 1066 / (2.0 * 1066 + 6 + 11), 1e-15);
}

TEST(ClassificationMetrics, DegenerateDenominators) {
  // No predicted positives and no actual positives.
  const auto m = ClassificationMetrics({0, 10, 0, 0});
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.fnr, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
  const auto z = ClassificationMetrics({0, 0, 5, 5});
  EXPECT_EQ(z.f1, 0.0);
  EXPECT_EDYSEC_ERROR(ClassificationMetrics({}), ErrorCode::kInvalidArgument);
}

TEST(RocAuc, KnownValues) {
  const std::vector<int> y = {0, 0, 1, 1};
  EXPECT_EQ(RocAuc(y, std::vector<double>{0.1, 0.4, 0.35, 0.8}), 0.75);
  EXPECT_EQ(RocAuc(y, std::vector<double>{0.1, 0.2, 0.3, 0.4}), 1.0);
  EXPECT_EQ(RocAuc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0.5);
  EXPECT_EQ(RocAuc(y, std::vector<double>{0.9, 0.8, 0.1, 0.2}), 0.0);
}

TEST(RocAuc, MatchesPairCountingWithTies) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.Index(60);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < 1 ? 0 : i < 2 ? 1 : static_cast<int>(rng.Index(2));
      s[i] = static_cast<double>(rng.Index(5)) / 4.0;
    }
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    EXPECT_EQ(RocAuc(y, s), wins / pairs);
  }
}

TEST(RocAuc, InvariantUnderMonotoneTransform) {
  const std::vector<int> y = {0, 1, 0, 1, 1, 0, 1};
  const std::vector<double> s = {0.1, 0.7, 0.3, 0.3, 0.9, 0.2, 0.6};
  std::vector<double> t;
  for (double v : s) t.push_back(std::exp(5 * v) - 3);
  EXPECT_EQ(RocAuc(y, s), RocAuc(y, t));
}

TEST(RocAuc, SingleClassRejected) {
  const std::vector<int> y = {1, 1};
  EXPECT_EDYSEC_ERROR(RocAuc(y, std::vector<double>{0.2, 0.3}), ErrorCode::kSingleClass);
}

TEST(Evaluate, SingleClassLeavesAucZero) {
  const std::vector<int> y = {1, 1, 1};
  const auto m = Evaluate(y, std::vector<double>{0.9, 0.8, 0.2});
  EXPECT_EQ(m.auc, 0.0);
  EXPECT_NEAR(m.recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(Accuracy(y, std::vector<double>{0.9, 0.8, 0.2}), 2.0 / 3.0, 1e-15);
}

}  // namespace
}  // namespace edysec
