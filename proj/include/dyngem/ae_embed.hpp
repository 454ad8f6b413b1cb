// Copyright 2026 The dyngem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyngem/embedding.hpp"
#include "dyngem/graph.hpp"
#include "dyngem/linalg.hpp"
#include "dyngem/mlp.hpp"
#include "dyngem/rng.hpp"

namespace dyngem {

// Autoencoder hyperparameters. Defaults follow the reference usage of the
// original toolkit (d=128, beta=5, two-step lookback, ...).
struct AeConfig {
  int d = 128;
  double beta = 5.0;
  double nu1 = 1e-6;
  double nu2 = 1e-6;
  std::vector<int> enc_units{500, 300};
  std::vector<int> dec_units{500, 300};
  int n_iter = 250;
  int n_iter_warm = -1;  // epochs for warm-started snapshots; -1 means n_iter
  double xeta = 1e-3;
  int n_batch = 100;
  int lookback = 2;
  double rho = 0.3;  // accepted for compatibility; not used by any loss
  std::uint64_t seed = 0;
  std::uint64_t seed_stride = 1;  // snapshot t trains with seed + seed_stride * t
  bool proper_rotation = false;   // force det(R) = +1 in alignment

  AeLossWeights loss_weights() const { return {beta, nu1, nu2}; }
  int warm_epochs() const { return n_iter_warm < 0 ? n_iter : n_iter_warm; }
  std::uint64_t seed_for(std::size_t t) const { return seed + seed_stride * t; }
};

inline void validate(const AeConfig& c) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument("AeConfig: " + msg); };
  if (c.d < 1) bad("d must be positive");
  if (!(c.beta >= 1.0)) bad("beta must be >= 1");
  if (!(c.nu1 >= 0.0) || !(c.nu2 >= 0.0)) bad("nu1 and nu2 must be non-negative");
  if (c.lookback < 1) bad("lookback must be >= 1");
  if (c.n_batch < 1) bad("n_batch must be >= 1");
  if (!(c.xeta > 0.0)) bad("xeta must be positive");
  if (c.n_iter < 0) bad("n_iter must be non-negative");
  if (c.n_iter_warm < -1) bad("n_iter_warm must be -1 or non-negative");
  for (int u : c.enc_units) if (u < 1) bad("enc_units must be positive");
  for (int u : c.dec_units) if (u < 1) bad("dec_units must be positive");
}

struct TrainResult {
  MlpParams params;
  double initial_loss = 0.0;
  // Per epoch: reconstruction error summed over that epoch's batches plus the
  // regularizer at the end of the epoch.
  std::vector<double> epoch_loss;
};

// Minibatch gradient descent on ae_loss. Each epoch visits the rows in an
// order shuffled by rng; the regularizer is applied in full on every batch.
inline TrainResult train_autoencoder(MlpParams params, const Matrix& inputs,
                                     const Matrix& targets, const AeConfig& cfg, int epochs,
                                     Rng& rng) {
  const auto w = cfg.loss_weights();
  TrainResult out;
  out.initial_loss = ae_loss(params, inputs, targets, w);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<Eigen::Index>(cfg.n_batch);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    double recon = 0.0;
    for (Eigen::Index start = 0; start < inputs.rows(); start += batch) {
      const Eigen::Index count = std::min(batch, inputs.rows() - start);
      Matrix bx(count, inputs.cols());
      Matrix bt(count, targets.cols());
      for (Eigen::Index i = 0; i < count; ++i) {
        bx.row(i) = inputs.row(order[start + i]);
        bt.row(i) = targets.row(order[start + i]);
      }
      double loss = 0.0;
      const auto g = ae_gradient(params, bx, bt, w, &loss);
      if (!std::isfinite(loss)) {
        throw NonFiniteError("training: non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(start / batch));
      }
      recon += loss - detail::regularizer(params, w);
      gradient_step(params, g, cfg.xeta);
    }
    out.epoch_loss.push_back(recon + detail::regularizer(params, w));
  }
  out.params = std::move(params);
  return out;
}

inline MlpParams fresh_static_ae(NodeId n, const AeConfig& cfg, Rng& rng) {
  return make_autoencoder(n, cfg.enc_units, cfg.d, cfg.dec_units, n, rng);
}

// Trains on the adjacency rows of g (input and target are both row u). With
// no init, a fresh model is drawn from the seed first, then the same stream
// drives the shuffles.
inline TrainResult train_static_ae(const GraphSnapshot& g, const AeConfig& cfg,
                                   std::optional<MlpParams> init = std::nullopt,
                                   std::optional<int> epochs = std::nullopt,
                                   std::uint64_t seed = 0) {
  validate(cfg);
  Rng rng(seed);
  MlpParams params = init ? std::move(*init) : fresh_static_ae(g.num_nodes(), cfg, rng);
  if (params.input_dim() != g.num_nodes() || params.output_dim() != g.num_nodes()) {
    throw std::invalid_argument("train_static_ae: model width does not match node count");
  }
  const Matrix a = dense_adjacency(g);
  return train_autoencoder(std::move(params), a, a, cfg, epochs.value_or(cfg.n_iter), rng);
}

struct AlignedChain {
  std::vector<Matrix> aligned;
  std::vector<Matrix> rotations;  // rotations[0] is the identity
};

// Y(t) <- Y(t) R(t), R(t) = procrustes(Y(t), aligned Y(t-1)).
inline AlignedChain align_chain(const std::vector<Matrix>& raw, bool proper_rotation = false) {
  AlignedChain out;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (t == 0) {
      out.rotations.push_back(Matrix::Identity(raw[0].cols(), raw[0].cols()));
      out.aligned.push_back(raw[0]);
      continue;
    }
    Matrix r = procrustes_rotation(raw[t], out.aligned.back(), proper_rotation);
    out.aligned.push_back(raw[t] * r);
    out.rotations.push_back(std::move(r));
  }
  return out;
}

struct AeSeriesResult {
  EmbeddingSeries series;
  std::vector<TrainResult> training;  // one per trained snapshot (or one shared model)
  std::vector<Matrix> rotations;      // aealign only
};

inline nlohmann::ordered_json to_json(const AeConfig& c) {
  return {{"d", c.d},         {"beta", c.beta},           {"nu1", c.nu1},
          {"nu2", c.nu2},     {"enc_units", c.enc_units}, {"dec_units", c.dec_units},
          {"n_iter", c.n_iter}, {"n_iter_warm", c.n_iter_warm}, {"xeta", c.xeta},
          {"n_batch", c.n_batch}, {"lookback", c.lookback}, {"rho", c.rho},
          {"seed", c.seed},   {"seed_stride", c.seed_stride},
          {"proper_rotation", c.proper_rotation}};
}

// Independent autoencoder per snapshot, no alignment.
inline AeSeriesResult static_ae_series(const SnapshotSequence& seq, const AeConfig& cfg) {
  AeSeriesResult out;
  out.series.method = "ae_static";
  out.series.config = to_json(cfg);
  for (std::size_t t = 0; t < seq.length(); ++t) {
    auto tr = train_static_ae(seq[t], cfg, std::nullopt, std::nullopt, cfg.seed_for(t));
    Matrix y = encode(tr.params, dense_adjacency(seq[t]));
    out.series.push(t, y, y);
    out.training.push_back(std::move(tr));
  }
  return out;
}

inline AeSeriesResult aealign_series(const SnapshotSequence& seq, const AeConfig& cfg) {
  AeSeriesResult out;
  std::vector<Matrix> raw;
  for (std::size_t t = 0; t < seq.length(); ++t) {
    auto tr = train_static_ae(seq[t], cfg, std::nullopt, std::nullopt, cfg.seed_for(t));
    raw.push_back(encode(tr.params, dense_adjacency(seq[t])));
    out.training.push_back(std::move(tr));
  }
  auto chain = align_chain(raw, cfg.proper_rotation);
  out.series.method = "aealign";
  out.series.config = to_json(cfg);
  for (std::size_t t = 0; t < seq.length(); ++t) {
    out.series.push(t, chain.aligned[t], chain.aligned[t]);
  }
  out.rotations = std::move(chain.rotations);
  return out;
}

// Snapshot 0 trains from a fresh model; snapshot t > 0 starts from the
// parameters trained at t - 1 and runs warm_epochs() epochs. on_model, when
// set, receives each snapshot's trained parameters.
inline AeSeriesResult dyngem_series(
    const SnapshotSequence& seq, const AeConfig& cfg,
    const std::function<void(std::size_t, const MlpParams&)>& on_model = {}) {
  AeSeriesResult out;
  out.series.method = "dyngem";
  out.series.config = to_json(cfg);
  std::optional<MlpParams> carry;
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const int epochs = carry ? cfg.warm_epochs() : cfg.n_iter;
    auto tr = train_static_ae(seq[t], cfg, carry, epochs, cfg.seed_for(t));
    Matrix y = encode(tr.params, dense_adjacency(seq[t]));
    out.series.push(t, y, y);
    if (on_model) on_model(t, tr.params);
    carry = tr.params;
    out.training.push_back(std::move(tr));
  }
  return out;
}

// Row u of the result is [a_u(t - lookback + 1), ..., a_u(t)].
inline Matrix lookback_window(const std::vector<Matrix>& adjacency, std::size_t t, int lookback) {
  if (t + 1 < static_cast<std::size_t>(lookback) || t >= adjacency.size()) {
    throw std::out_of_range("lookback_window: window ending at " + std::to_string(t) +
                            " unavailable");
  }
  const Eigen::Index n = adjacency.front().rows();
  Matrix w(n, n * lookback);
  for (int k = 0; k < lookback; ++k) {
    w.middleCols(n * k, n) = adjacency[t + 1 - lookback + k];
  }
  return w;
}

// Decodes a node's lookback window into its predicted next adjacency row.
class NextStepPredictor {
 public:
  NextStepPredictor(MlpParams params, std::vector<Matrix> adjacency, int lookback)
      : params_(std::move(params)), adjacency_(std::move(adjacency)), lookback_(lookback) {}

  // Predicted adjacency of snapshot t + 1 from the window ending at t.
  Matrix predict_next(std::size_t t) const {
    return forward_batch(params_, lookback_window(adjacency_, t, lookback_)).output();
  }

  Matrix embed(std::size_t t) const {
    return encode(params_, lookback_window(adjacency_, t, lookback_));
  }

  const MlpParams& params() const { return params_; }
  int lookback() const { return lookback_; }
  std::size_t length() const { return adjacency_.size(); }

 private:
  MlpParams params_;
  std::vector<Matrix> adjacency_;
  int lookback_;
};

struct D2vResult {
  EmbeddingSeries series;
  TrainResult training;
  NextStepPredictor predictor;
};

// Builds the (window ending at t -> row at t + 1) pairs for every node and
// every t in [lookback - 1, T - 2].
inline std::pair<Matrix, Matrix> d2v_training_pairs(const std::vector<Matrix>& adjacency,
                                                    int lookback) {
  const Eigen::Index n = adjacency.front().rows();
  const std::size_t first = static_cast<std::size_t>(lookback) - 1;
  const std::size_t steps = adjacency.size() - 1 - first;
  Matrix inputs(n * static_cast<Eigen::Index>(steps), n * lookback);
  Matrix targets(n * static_cast<Eigen::Index>(steps), n);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = first + s;
    inputs.middleRows(n * s, n) = lookback_window(adjacency, t, lookback);
    targets.middleRows(n * s, n) = adjacency[t + 1];
  }
  return {std::move(inputs), std::move(targets)};
}

// One model over all windows; embeddings exist for every t >= lookback - 1.
inline D2vResult d2v_ae_series(const SnapshotSequence& seq, const AeConfig& cfg) {
  validate(cfg);
  if (seq.length() < static_cast<std::size_t>(cfg.lookback) + 1) {
    throw std::invalid_argument("d2v_ae_series: need at least lookback + 1 = " +
                                std::to_string(cfg.lookback + 1) + " snapshots, got " +
                                std::to_string(seq.length()));
  }
  std::vector<Matrix> adjacency;
  for (const auto& g : seq.snapshots()) adjacency.push_back(dense_adjacency(g));
  const NodeId n = seq.num_nodes();
  auto [inputs, targets] = d2v_training_pairs(adjacency, cfg.lookback);

  Rng rng(cfg.seed);
  MlpParams init = make_autoencoder(static_cast<Eigen::Index>(n) * cfg.lookback, cfg.enc_units,
                                    cfg.d, cfg.dec_units, n, rng);
  TrainResult tr = train_autoencoder(std::move(init), inputs, targets, cfg, cfg.n_iter, rng);

  NextStepPredictor predictor(tr.params, std::move(adjacency), cfg.lookback);
  EmbeddingSeries series;
  series.method = "d2v_ae";
  series.config = to_json(cfg);
  for (std::size_t t = static_cast<std::size_t>(cfg.lookback) - 1; t < seq.length(); ++t) {
    Matrix y = predictor.embed(t);
    series.push(t, y, y);
  }
  return {std::move(series), std::move(tr), std::move(predictor)};
}

}  // namespace dyngem
