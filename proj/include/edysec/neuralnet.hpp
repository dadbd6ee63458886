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

// Feedforward binary classifier: ReLU hidden layers with inverted dropout, a
// single sigmoid output, binary cross-entropy and Adam. Double precision.

#ifndef EDYSEC_NEURALNET_HPP_
#define EDYSEC_NEURALNET_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edysec/common.hpp"
#include "edysec/metrics.hpp"

namespace edysec {

struct HiddenLayerSpec {
  std::size_t units = 0;
  double dropout = 0.0;

  bool operator==(const HiddenLayerSpec&) const = default;
};

struct NetworkSpec {
  std::size_t input_width = 0;
  std::vector<HiddenLayerSpec> hidden;

  bool operator==(const NetworkSpec&) const = default;

  void Validate() const {
    Require(input_width >= 1, "network input width must be >= 1");
    for (const auto& h : hidden) {
      Require(h.units >= 1, "hidden layer needs at least one unit");
      Require(h.dropout >= 0.0 && h.dropout < 1.0, "dropout rate must lie in [0, 1)");
    }
  }

  // Three 500-unit layers with dropout 0.1 / 0.2 / 0.3.
  static NetworkSpec Mlp(std::size_t input_width) {
    return {input_width, {{500, 0.1}, {500, 0.2}, {500, 0.3}}};
  }
  // Two 68-unit layers, no dropout.
  static NetworkSpec Nn(std::size_t input_width) { return {input_width, {{68, 0.0}, {68, 0.0}}}; }
  // Cheap model used to score candidate feature subsets.
  static NetworkSpec Baseline(std::size_t input_width) { return {input_width, {{64, 0.0}}}; }
};

inline std::size_t ParamCount(const NetworkSpec& spec) {
  std::size_t total = 0;
  std::size_t in = spec.input_width;
  for (const auto& h : spec.hidden) {
    total += in * h.units + h.units;
    in = h.units;
  }
  return total + in + 1;
}

// Weights are row-major [out][in].
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_width, std::size_t out_width)
      : in(in_width), out(out_width), weights(in_width * out_width, 0.0), bias(out_width, 0.0) {}

  bool operator==(const DenseLayer&) const = default;
};

struct NetworkParams {
  NetworkSpec spec;
  std::vector<DenseLayer> layers;  // hidden layers, then the output layer

  bool operator==(const NetworkParams&) const = default;

  std::size_t Size() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
  }
};

inline std::vector<DenseLayer> ZeroLayersLike(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.emplace_back(l.in, l.out);
  return out;
}

// He-uniform weights, bound sqrt(6 / fan_in); zero biases.
inline NetworkParams InitNetwork(const NetworkSpec& spec, std::uint64_t seed) {
  spec.Validate();
  NetworkParams params;
  params.spec = spec;
  Rng rng(DeriveSeed(seed, 0x1417u));
  std::size_t in = spec.input_width;
  auto add_layer = [&](std::size_t out) {
    DenseLayer layer(in, out);
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    for (double& w : layer.weights) w = rng.Uniform(-bound, bound);
    params.layers.push_back(std::move(layer));
    in = out;
  };
  for (const auto& h : spec.hidden) add_layer(h.units);
  add_layer(1);
  return params;
}

inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

enum class Mode { kTrain, kEval };

// Activations kept from a forward pass over a batch, consumed by Backward.
struct BatchTrace {
  std::size_t batch = 0;
  // acts[0] is the input block; acts[l + 1] the post-dropout output of hidden
  // layer l. Each is batch x width, row-major.
  std::vector<std::vector<double>> acts;
  // Inverted-dropout scale per hidden unit (0 or 1/(1-rate)); empty when the
  // layer had no dropout applied.
  std::vector<std::vector<double>> masks;
  std::vector<double> output;  // probabilities
};

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

// out (batch x layer.out) = in (batch x layer.in) * W^T + bias.
inline void DenseForward(const DenseLayer& layer, const double* in, double* out,
                         std::size_t batch) {
  const auto b = static_cast<Eigen::Index>(batch);
  const auto n_in = static_cast<Eigen::Index>(layer.in);
  const auto n_out = static_cast<Eigen::Index>(layer.out);
  ConstRowMap a(in, b, n_in);
  ConstRowMap w(layer.weights.data(), n_out, n_in);
  RowMap z(out, b, n_out);
  z.noalias() = a * w.transpose();
  z.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(layer.bias.data(), n_out);
}

}  // namespace detail

// Forward over `rows` of x. Train mode draws dropout masks from `rng`.
inline BatchTrace ForwardBatch(const NetworkParams& params, const Matrix& x,
                               std::span<const std::size_t> rows, Mode mode, Rng* rng = nullptr) {
  if (x.cols != params.spec.input_width) {
    throw Error(ErrorCode::kWidthMismatch, "input width " + std::to_string(x.cols) +
                                               " != network width " +
                                               std::to_string(params.spec.input_width));
  }
  Require(mode == Mode::kEval || rng != nullptr, "train-mode forward needs a random stream");
  const std::size_t batch = rows.size();
  const std::size_t hidden = params.spec.hidden.size();
  BatchTrace trace;
  trace.batch = batch;
  trace.acts.resize(hidden + 1);
  trace.masks.resize(hidden);
  trace.acts[0].resize(batch * x.cols);
  for (std::size_t b = 0; b < batch; ++b) {
    auto row = x.Row(rows[b]);
    std::copy(row.begin(), row.end(), trace.acts[0].begin() + static_cast<std::ptrdiff_t>(b * x.cols));
  }
  for (std::size_t l = 0; l < hidden; ++l) {
    const DenseLayer& layer = params.layers[l];
    auto& out = trace.acts[l + 1];
    out.resize(batch * layer.out);
    const double rate = params.spec.hidden[l].dropout;
    const bool drop = mode == Mode::kTrain && rate > 0.0;
    if (drop) trace.masks[l].resize(batch * layer.out);
    const double keep_scale = 1.0 / (1.0 - rate);
    detail::DenseForward(layer, trace.acts[l].data(), out.data(), batch);
    for (std::size_t b = 0; b < batch; ++b) {
      double* z = out.data() + b * layer.out;
      for (std::size_t o = 0; o < layer.out; ++o) {
        double a = z[o] > 0.0 ? z[o] : 0.0;
        if (drop) {
          const double m = rng->Uniform() < rate ? 0.0 : keep_scale;
          trace.masks[l][b * layer.out + o] = m;
          a *= m;
        }
        z[o] = a;
      }
    }
  }
  const DenseLayer& last = params.layers.back();
  trace.output.resize(batch);
  detail::DenseForward(last, trace.acts[hidden].data(), trace.output.data(), batch);
  for (double& p : trace.output) p = Sigmoid(p);
  return trace;
}

inline double Forward(const NetworkParams& params, std::span<const double> x,
                      Mode mode = Mode::kEval, Rng* rng = nullptr) {
  if (x.size() != params.spec.input_width) {
    throw Error(ErrorCode::kWidthMismatch, "input width mismatch");
  }
  Matrix single(1, x.size());
  std::copy(x.begin(), x.end(), single.data.begin());
  const std::size_t row = 0;
  return ForwardBatch(params, single, std::span<const std::size_t>(&row, 1), mode, rng).output[0];
}

inline constexpr double kBceClamp = 1e-7;

inline double BceLoss(double p, int y) {
  p = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
  return -(y == 1 ? std::log(p) : std::log(1.0 - p));
}

struct Gradients {
  std::vector<DenseLayer> layers;
};

// Exact gradient of the mean batch BCE. The output delta p - y is the
// derivative of the unclamped loss, which equals the clamped one inside
// [1e-7, 1 - 1e-7].
inline Gradients Backward(const NetworkParams& params, const BatchTrace& trace,
                          std::span<const int> labels) {
  const std::size_t hidden = params.spec.hidden.size();
  if (trace.batch == 0 || trace.acts.size() != hidden + 1 || trace.output.size() != trace.batch ||
      labels.size() != trace.batch) {
    throw Error(ErrorCode::kStateMissing, "forward trace does not match this batch");
  }
  const std::size_t batch = trace.batch;
  Gradients grads{ZeroLayersLike(params.layers)};
  const double inv_batch = 1.0 / static_cast<double>(batch);

  // delta holds dL/dz for the layer currently being processed, batch x out.
  std::vector<double> delta(batch);
  for (std::size_t b = 0; b < batch; ++b) delta[b] = (trace.output[b] - labels[b]) * inv_batch;

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    DenseLayer& g = grads.layers[l];
    const std::vector<double>& input = trace.acts[l];
    const auto b = static_cast<Eigen::Index>(batch);
    const auto n_in = static_cast<Eigen::Index>(layer.in);
    const auto n_out = static_cast<Eigen::Index>(layer.out);
    detail::ConstRowMap a(input.data(), b, n_in);
    detail::ConstRowMap d(delta.data(), b, n_out);
    detail::RowMap(g.weights.data(), n_out, n_in).noalias() = d.transpose() * a;
    Eigen::Map<Eigen::RowVectorXd>(g.bias.data(), n_out) = d.colwise().sum();
    std::vector<double> prev;
    if (l > 0) {
      prev.resize(batch * layer.in);
      detail::RowMap(prev.data(), b, n_in).noalias() =
          d * detail::ConstRowMap(layer.weights.data(), n_out, n_in);
    }
    if (l > 0) {
      // Through ReLU and dropout of hidden layer l-1: a > 0 iff unit active
      // and kept, in which case da/dz equals the mask scale.
      const auto& mask = trace.masks[l - 1];
      for (std::size_t k = 0; k < prev.size(); ++k) {
        if (input[k] <= 0.0) {
          prev[k] = 0.0;
        } else if (!mask.empty()) {
          prev[k] *= mask[k];
        }
      }
      delta = std::move(prev);
    }
  }
  return grads;
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<DenseLayer> m;
  std::vector<DenseLayer> v;

  static AdamState For(const NetworkParams& params) {
    return {ZeroLayersLike(params.layers), ZeroLayersLike(params.layers)};
  }
};

namespace detail {

inline void AdamUpdate(std::vector<double>& theta, const std::vector<double>& g,
                       std::vector<double>& m, std::vector<double>& v, double lr,
                       const AdamConfig& cfg, double c1, double c2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace detail

// One Adam update at 1-based step t, in place.
inline void AdamStep(NetworkParams& params, const Gradients& grads, AdamState& state,
                     std::size_t t, const AdamConfig& cfg) {
  Require(t >= 1, "Adam step index is 1-based");
  const std::size_t n = params.layers.size();
  if (grads.layers.size() != n || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "Adam state/gradients do not match parameters");
  }
  for (std::size_t l = 0; l < n; ++l) {
    const auto& p = params.layers[l];
    if (grads.layers[l].weights.size() != p.weights.size() ||
        grads.layers[l].bias.size() != p.bias.size() ||
        state.m[l].weights.size() != p.weights.size() ||
        state.v[l].weights.size() != p.weights.size() || state.m[l].bias.size() != p.bias.size() ||
        state.v[l].bias.size() != p.bias.size()) {
      throw Error(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " shape mismatch");
    }
  }
  const double td = static_cast<double>(t);
  const double c1 = 1.0 - std::pow(cfg.beta1, td);
  const double c2 = 1.0 - std::pow(cfg.beta2, td);
  for (std::size_t l = 0; l < n; ++l) {
    detail::AdamUpdate(params.layers[l].weights, grads.layers[l].weights, state.m[l].weights,
                       state.v[l].weights, cfg.learning_rate, cfg, c1, c2);
    detail::AdamUpdate(params.layers[l].bias, grads.layers[l].bias, state.m[l].bias,
                       state.v[l].bias, cfg.learning_rate, cfg, c1, c2);
  }
}

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  AdamConfig adam;
  std::uint64_t seed = 42;
  bool shuffle = true;
  // Stop after this many epochs without validation-loss improvement and keep
  // the best parameters. Disabled when unset.
  std::optional<std::size_t> patience;

  void Validate() const {
    Require(epochs >= 1, "epochs must be >= 1");
    Require(batch_size >= 1, "batch size must be >= 1");
    Require(adam.learning_rate > 0.0, "learning rate must be > 0");
  }

  static TrainConfig Baseline(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 64;
    cfg.seed = seed;
    return cfg;
  }
};

struct EpochRecord {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  double wall_seconds = 0.0;
};

inline std::vector<double> PredictProba(const NetworkParams& params, const Matrix& x) {
  if (x.rows == 0) return {};
  if (x.cols != params.spec.input_width) {
    throw Error(ErrorCode::kWidthMismatch, "matrix width " + std::to_string(x.cols) +
                                               " != network width " +
                                               std::to_string(params.spec.input_width));
  }
  std::vector<double> out;
  out.reserve(x.rows);
  constexpr std::size_t kChunk = 256;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < x.rows; start += kChunk) {
    const std::size_t end = std::min(x.rows, start + kChunk);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    auto trace = ForwardBatch(params, x, rows, Mode::kEval);
    out.insert(out.end(), trace.output.begin(), trace.output.end());
  }
  return out;
}

inline double MeanBce(std::span<const double> p, std::span<const int> y) {
  if (p.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += BceLoss(p[i], y[i]);
  return s / static_cast<double>(p.size());
}

struct TrainResult {
  NetworkParams params;
  TrainHistory history;
};

// Mini-batch Adam. Shuffling and dropout draw from streams derived from
// (seed, epoch), so the run is a pure function of its inputs.
inline TrainResult Train(const NetworkSpec& spec, const TrainConfig& cfg, const Matrix& train_x,
                         std::span<const int> train_y, const Matrix* val_x = nullptr,
                         std::span<const int> val_y = {}) {
  spec.Validate();
  cfg.Validate();
  if (train_x.cols != spec.input_width || (val_x && val_x->cols != spec.input_width)) {
    throw Error(ErrorCode::kWidthMismatch, "training matrices must match the network width");
  }
  Require(train_x.rows == train_y.size(), "training labels must align with rows",
          ErrorCode::kLengthMismatch);
  Require(train_x.rows > 0, "training set is empty");
  const auto start = std::chrono::steady_clock::now();

  TrainResult result{InitNetwork(spec, cfg.seed), {}};
  AdamState state = AdamState::For(result.params);
  std::size_t step = 0;
  std::vector<std::size_t> order(train_x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_labels;

  double best_val = std::numeric_limits<double>::infinity();
  std::optional<NetworkParams> best;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng shuffle_rng(DeriveSeed(cfg.seed, 0x5fu, epoch));
      shuffle_rng.Shuffle(order);
    }
    Rng dropout_rng(DeriveSeed(cfg.seed, 0xd0u, epoch));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t s = 0; s < order.size(); s += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), s + cfg.batch_size);
      std::span<const std::size_t> rows(order.data() + s, e - s);
      batch_labels.resize(rows.size());
      for (std::size_t b = 0; b < rows.size(); ++b) batch_labels[b] = train_y[rows[b]];
      auto trace = ForwardBatch(result.params, train_x, rows, Mode::kTrain, &dropout_rng);
      for (std::size_t b = 0; b < rows.size(); ++b) {
        loss_sum += BceLoss(trace.output[b], batch_labels[b]);
        correct += ((trace.output[b] >= kDefaultThreshold) == (batch_labels[b] == 1));
      }
      auto grads = Backward(result.params, trace, batch_labels);
      AdamStep(result.params, grads, state, ++step, cfg.adam);
    }
    EpochRecord rec;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (val_x && val_x->rows > 0) {
      auto p = PredictProba(result.params, *val_x);
      rec.val_loss = MeanBce(p, val_y);
      rec.val_accuracy = Accuracy(val_y, p);
    }
    result.history.epochs.push_back(rec);
    if (cfg.patience && val_x && val_x->rows > 0) {
      if (rec.val_loss < best_val) {
        best_val = rec.val_loss;
        best = result.params;
        since_best = 0;
      } else if (++since_best >= *cfg.patience) {
        break;
      }
    }
  }
  if (best) result.params = std::move(*best);
  result.history.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace edysec

#endif  // EDYSEC_NEURALNET_HPP_
