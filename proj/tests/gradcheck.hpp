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

// Central-difference check of Backward on one batch.

#ifndef EDYSEC_TESTS_GRADCHECK_HPP_
#define EDYSEC_TESTS_GRADCHECK_HPP_

#include <cmath>
#include <numeric>
#include <vector>

#include "edysec/neuralnet.hpp"

namespace edysec::testing {

struct GradCheck {
  double relative_error = 0.0;  // ||analytic - numeric|| / (||analytic|| + ||numeric||)
  std::size_t parameters = 0;
};

// Dropout masks are reproduced by reseeding the stream for every pass.
inline double BatchLoss(const NetworkParams& p, const Matrix& x, std::span<const int> y,
                        Mode mode, std::uint64_t mask_seed) {
  std::vector<std::size_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(mask_seed);
  const auto t = ForwardBatch(p, x, rows, mode, &rng);
  double s = 0;
  for (std::size_t b = 0; b < t.batch; ++b) s += BceLoss(t.output[b], y[b]);
  return s / static_cast<double>(t.batch);
}

inline GradCheck CheckGradient(const NetworkParams& params, const Matrix& x,
                               std::span<const int> y, Mode mode, std::uint64_t mask_seed,
                               double h = 1e-6) {
  std::vector<std::size_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(mask_seed);
  const auto grads = Backward(params, ForwardBatch(params, x, rows, mode, &rng), y);
  NetworkParams work = params;
  double diff = 0, na = 0, nn = 0;
  GradCheck out;
  for (std::size_t l = 0; l < work.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      auto& theta = which == 0 ? work.layers[l].weights : work.layers[l].bias;
      const auto& g = which == 0 ? grads.layers[l].weights : grads.layers[l].bias;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        theta[i] = keep + h;
        const double up = BatchLoss(work, x, y, mode, mask_seed);
        theta[i] = keep - h;
        const double down = BatchLoss(work, x, y, mode, mask_seed);
        theta[i] = keep;
        const double numeric = (up - down) / (2 * h);
        diff += (g[i] - numeric) * (g[i] - numeric);
        na += g[i] * g[i];
        nn += numeric * numeric;
        ++out.parameters;
      }
    }
  }
  const double denom = std::sqrt(na) + std::sqrt(nn);
  out.relative_error = denom > 0 ? std::sqrt(diff) / denom : 0.0;
  return out;
}

// Random small network and batch for trial `trial`.
struct GradCase {
  NetworkParams params;
  Matrix x;
  std::vector<int> y;
  Mode mode = Mode::kEval;
};

inline GradCase RandomGradCase(std::uint64_t trial) {
  Rng rng(DeriveSeed(0x6c7dULL, trial));
  NetworkSpec spec;
  spec.input_width = 1 + rng.Index(6);
  const std::size_t depth = rng.Index(4);
  for (std::size_t i = 0; i < depth; ++i) {
    spec.hidden.push_back({1 + rng.Index(7), trial % 2 ? 0.0 : 0.25 * rng.Uniform()});
  }
  GradCase c;
  c.params = InitNetwork(spec, DeriveSeed(trial, 1));
  for (auto& layer : c.params.layers) {
    for (double& b : layer.bias) b = rng.Uniform(-0.5, 0.5);
  }
  const std::size_t batch = 1 + rng.Index(8);
  c.x = Matrix(batch, spec.input_width);
  for (double& v : c.x.data) v = rng.Normal();
  for (std::size_t b = 0; b < batch; ++b) c.y.push_back(static_cast<int>(rng.Index(2)));
  c.mode = trial % 2 ? Mode::kEval : Mode::kTrain;
  return c;
}

}  // namespace edysec::testing

#endif  // EDYSEC_TESTS_GRADCHECK_HPP_
