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

#include <cmath>

#include "edysec/neuralnet.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

namespace edysec {
namespace {

TEST(ParamCount, Architectures) {
  EXPECT_EQ(ParamCount(NetworkSpec::Mlp(1543)), 1273501u);
  EXPECT_EQ(ParamCount(NetworkSpec::Nn(10)), 10u * 68 + 68 + 68 * 68 + 68 + 68 + 1);
  EXPECT_EQ(ParamCount(NetworkSpec{7, {}}), 8u);
  EXPECT_EQ(InitNetwork(NetworkSpec::Nn(12), 1).Size(), ParamCount(NetworkSpec::Nn(12)));
}

TEST(InitNetwork, HeUniformBoundsAndZeroBias) {
  const auto p = InitNetwork(NetworkSpec::Nn(25), 3);
  for (const auto& layer : p.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
    for (double w : layer.weights) EXPECT_LE(std::abs(w), bound);
    for (double b : layer.bias) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(p, InitNetwork(NetworkSpec::Nn(25), 3));
  EXPECT_NE(p, InitNetwork(NetworkSpec::Nn(25), 4));
}

TEST(NetworkSpec, Validation) {
  EXPECT_EDYSEC_ERROR(InitNetwork(NetworkSpec{0, {}}, 1), ErrorCode::kInvalidArgument);
  EXPECT_EDYSEC_ERROR(InitNetwork(NetworkSpec{3, {{4, 1.0}}}, 1), ErrorCode::kInvalidArgument);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(Sigmoid(0.0), 0.5);
  EXPECT_EQ(Sigmoid(-1000.0), 0.0);
  EXPECT_EQ(Sigmoid(1000.0), 1.0);
  EXPECT_NEAR(Sigmoid(2.0) + Sigmoid(-2.0), 1.0, 1e-15);
}

TEST(BceLoss, ClampedAndFinite) {
  EXPECT_NEAR(BceLoss(0.0, 1), -std::log(kBceClamp), 1e-9);
  EXPECT_NEAR(BceLoss(1.0, 0), -std::log(kBceClamp), 1e-6);
  EXPECT_NEAR(BceLoss(0.8, 1), -std::log(0.8), 1e-15);
}

TEST(Forward, HandComputedNetwork) {
  NetworkParams p;
  p.spec = {2, {{2, 0.0}}};
  DenseLayer h(2, 2);
  h.weights = {1.0, -1.0, 0.5, 0.5};
  h.bias = {0.0, -1.0};
  DenseLayer o(2, 1);
  o.weights = {2.0, 3.0};
  o.bias = {-1.0};
  p.layers = {h, o};
  // hidden = relu([1 - 2, 0.5 + 1 - 1]) = [0, 0.5]; z = 1.5 - 1 = 0.5
  EXPECT_DOUBLE_EQ(Forward(p, std::vector<double>{1.0, 2.0}), Sigmoid(0.5));
  EXPECT_EDYSEC_ERROR(Forward(p, std::vector<double>{1.0}), ErrorCode::kWidthMismatch);
}

TEST(Forward, EvalIgnoresDropoutAndBatchingDoesNotMatter) {
  const auto p = InitNetwork(NetworkSpec::Mlp(6), 9);
  Matrix x(300, 6);
  Rng rng(2);
  for (double& v : x.data) v = rng.Normal();
  const auto batch = PredictProba(p, x);
  for (std::size_t r = 0; r < x.rows; r += 37) {
    // GEMM blocking differs with batch size; agreement is to rounding.
    EXPECT_NEAR(Forward(p, x.Row(r)), batch[r], 1e-12);
  }
}

TEST(Forward, TrainModeDropoutScalesKeptUnits) {
  NetworkParams p = InitNetwork(NetworkSpec{3, {{200, 0.5}}}, 1);
  Matrix x(1, 3, 1.0);
  const std::size_t row = 0;
  Rng rng(5);
  const auto t = ForwardBatch(p, x, std::span<const std::size_t>(&row, 1), Mode::kTrain, &rng);
  std::size_t kept = 0;
  for (double m : t.masks[0]) {
    EXPECT_TRUE(m == 0.0 || m == 2.0);
    kept += m > 0;
  }
  EXPECT_GT(kept, 60u);
  EXPECT_LT(kept, 140u);
  EXPECT_EDYSEC_ERROR(ForwardBatch(p, x, std::span<const std::size_t>(&row, 1), Mode::kTrain),
                      ErrorCode::kInvalidArgument);
}

TEST(Backward, MatchesCentralDifferences) {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const auto c = testing::RandomGradCase(trial);
    const auto g = testing::CheckGradient(c.params, c.x, c.y, c.mode, trial + 100);
    EXPECT_LE(g.relative_error, 1e-4) << "trial " << trial;
  }
}

TEST(Backward, RejectsForeignTrace) {
  const auto p = InitNetwork(NetworkSpec::Nn(3), 1);
  BatchTrace empty;
  const std::vector<int> y;
  EXPECT_EDYSEC_ERROR(Backward(p, empty, y), ErrorCode::kStateMissing);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  NetworkParams p;
  p.spec = {1, {}};
  p.layers = {DenseLayer(1, 1)};
  p.layers[0].weights = {1.0};
  Gradients g{{DenseLayer(1, 1)}};
  g.layers[0].weights = {0.3};
  g.layers[0].bias = {-2.0};
  auto state = AdamState::For(p);
  AdamConfig cfg;
  AdamStep(p, g, state, 1, cfg);
  // Bias-corrected first step is lr * sign(g) up to epsilon.
  EXPECT_NEAR(p.layers[0].weights[0], 1.0 - 1e-3, 1e-10);
  EXPECT_NEAR(p.layers[0].bias[0], 1e-3, 1e-10);
  EXPECT_EDYSEC_ERROR(AdamStep(p, g, state, 0, cfg), ErrorCode::kInvalidArgument);
  Gradients bad{{DenseLayer(2, 1)}};
  EXPECT_EDYSEC_ERROR(AdamStep(p, bad, state, 2, cfg), ErrorCode::kShapeMismatch);
}

struct Blobs {
  Matrix x;
  std::vector<int> y;
};

Blobs MakeBlobs(std::size_t n, std::uint64_t seed) {
  Blobs b{Matrix(n, 4), {}};
  Rng rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    const int label = static_cast<int>(r % 2);
    b.y.push_back(label);
    for (std::size_t c = 0; c < 4; ++c) b.x(r, c) = rng.Normal() + (label ? 1.5 : -1.5);
  }
  return b;
}

TEST(Train, LearnsSeparableData) {
  const auto tr = MakeBlobs(200, 1), va = MakeBlobs(100, 2);
  TrainConfig cfg;
  cfg.epochs = 30;
  const auto r = Train(NetworkSpec::Nn(4), cfg, tr.x, tr.y, &va.x, va.y);
  EXPECT_EQ(r.history.epochs.size(), 30u);
  EXPECT_LT(r.history.epochs.back().train_loss, r.history.epochs.front().train_loss);
  EXPECT_GE(Accuracy(va.y, PredictProba(r.params, va.x)), 0.97);
}

TEST(Train, SameSeedBitIdentical) {
  const auto tr = MakeBlobs(64, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  const auto a = Train(NetworkSpec::Mlp(4), cfg, tr.x, tr.y);
  const auto b = Train(NetworkSpec::Mlp(4), cfg, tr.x, tr.y);
  EXPECT_EQ(a.params, b.params);
  cfg.seed = 43;
  EXPECT_NE(Train(NetworkSpec::Mlp(4), cfg, tr.x, tr.y).params, a.params);
}

TEST(Train, PatienceStopsEarlyAndKeepsBest) {
  const auto tr = MakeBlobs(40, 4), va = MakeBlobs(40, 5);
  TrainConfig cfg;
  cfg.epochs = 400;
  cfg.patience = 3;
  cfg.adam.learning_rate = 0.05;
  const auto r = Train(NetworkSpec::Mlp(4), cfg, tr.x, tr.y, &va.x, va.y);
  EXPECT_LT(r.history.epochs.size(), 400u);
  double best = 1e300;
  for (const auto& e : r.history.epochs) best = std::min(best, e.val_loss);
  EXPECT_NEAR(MeanBce(PredictProba(r.params, va.x), va.y), best, 1e-12);
}

TEST(Train, InputErrors) {
  const auto tr = MakeBlobs(10, 1);
  TrainConfig cfg;
  EXPECT_EDYSEC_ERROR(Train(NetworkSpec::Nn(3), cfg, tr.x, tr.y), ErrorCode::kWidthMismatch);
  const std::vector<int> short_y = {1};
  EXPECT_EDYSEC_ERROR(Train(NetworkSpec::Nn(4), cfg, tr.x, short_y), ErrorCode::kLengthMismatch);
  cfg.epochs = 0;
  EXPECT_EDYSEC_ERROR(Train(NetworkSpec::Nn(4), cfg, tr.x, tr.y), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace edysec
