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

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyngem/rng.hpp"
#include "dyngem/text_io.hpp"
#include "dyngem/types.hpp"

namespace dyngem {

enum class Activation { kSigmoid, kLinear };

struct DenseLayer {
  Matrix W;  // out x in
  Vector b;  // out
  Activation activation = Activation::kSigmoid;
};

// Fully connected autoencoder. layers[0, encoder_layers) map the input to the
// embedding; the last encoder layer is linear, every other layer is sigmoid.
struct MlpParams {
  std::vector<DenseLayer> layers;
  std::size_t encoder_layers = 0;

  Eigen::Index input_dim() const { return layers.front().W.cols(); }
  Eigen::Index embedding_dim() const { return layers[encoder_layers - 1].W.rows(); }
  Eigen::Index output_dim() const { return layers.back().W.rows(); }

  bool all_finite() const {
    for (const auto& l : layers) {
      if (!l.W.allFinite() || !l.b.allFinite()) return false;
    }
    return true;
  }

  friend bool operator==(const MlpParams& a, const MlpParams& b) {
    if (a.encoder_layers != b.encoder_layers || a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
      if (a.layers[i].W != b.layers[i].W || a.layers[i].b != b.layers[i].b) return false;
    }
    return true;
  }
};

// Loss weights shared by ae_loss and ae_gradient.
struct AeLossWeights {
  double beta = 5.0;
  double nu1 = 1e-6;
  double nu2 = 1e-6;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void set_activations(MlpParams& p) {
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    p.layers[i].activation =
        (i + 1 == p.encoder_layers) ? Activation::kLinear : Activation::kSigmoid;
  }
}

// Encoder: input -> enc_units... -> d. Decoder mirrors the hidden widths:
// d -> reversed(dec_units)... -> output. Weights are Glorot-uniform, biases 0.
inline MlpParams make_autoencoder(Eigen::Index input_dim, const std::vector<int>& enc_units,
                                  Eigen::Index d, const std::vector<int>& dec_units,
                                  Eigen::Index output_dim, Rng& rng) {
  std::vector<Eigen::Index> widths{input_dim};
  for (int u : enc_units) widths.push_back(u);
  widths.push_back(d);
  for (auto it = dec_units.rbegin(); it != dec_units.rend(); ++it) widths.push_back(*it);
  widths.push_back(output_dim);
  for (auto w : widths) {
    if (w < 1) throw std::invalid_argument("make_autoencoder: layer widths must be positive");
  }

  MlpParams p;
  p.encoder_layers = enc_units.size() + 1;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const auto in = widths[i];
    const auto out = widths[i + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer;
    layer.W.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.W(r, c) = rng.uniform(-limit, limit);
    }
    layer.b = Vector::Zero(out);
    p.layers.push_back(std::move(layer));
  }
  set_activations(p);
  return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// activations[0] is the input batch, activations[i + 1] the output of layer i.
struct ForwardPass {
  std::vector<Matrix> activations;

  const Matrix& embedding(const MlpParams& p) const { return activations[p.encoder_layers]; }
  const Matrix& output() const { return activations.back(); }
};

inline Matrix apply_layer(const DenseLayer& layer, const Matrix& x) {
  Matrix z = x * layer.W.transpose();
  z.rowwise() += layer.b.transpose();
  if (layer.activation == Activation::kSigmoid) {
    z = (1.0 + (-z.array()).exp()).inverse().matrix();
  }
  return z;
}

// Rows of x are samples.
inline ForwardPass forward_batch(const MlpParams& p, const Matrix& x,
                                 std::size_t stop_after = static_cast<std::size_t>(-1)) {
  if (x.cols() != p.input_dim()) {
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " columns, model expects " + std::to_string(p.input_dim()));
  }
  ForwardPass fp;
  fp.activations.reserve(p.layers.size() + 1);
  fp.activations.push_back(x);
  const std::size_t n_layers = std::min(stop_after, p.layers.size());
  for (std::size_t i = 0; i < n_layers; ++i) {
    fp.activations.push_back(apply_layer(p.layers[i], fp.activations.back()));
    if (!fp.activations.back().allFinite()) {
      throw NonFiniteError("forward: non-finite activation at layer " + std::to_string(i));
    }
  }
  return fp;
}

struct AeOutput {
  Vector y;     // embedding
  Vector xhat;  // reconstruction
};

inline AeOutput ae_forward(const MlpParams& p, const Vector& x) {
  const auto fp = forward_batch(p, x.transpose());
  return {fp.embedding(p).row(0).transpose(), fp.output().row(0).transpose()};
}

// Encoder outputs for each row of x.
inline Matrix encode(const MlpParams& p, const Matrix& x) {
  return forward_batch(p, x, p.encoder_layers).activations.back();
}

namespace detail {

inline Matrix penalty_weights(const Matrix& targets, double beta) {
  return targets.unaryExpr([beta](double t) { return t > 0.0 ? beta : 1.0; });
}

inline double regularizer(const MlpParams& p, const AeLossWeights& w) {
  double l1 = 0.0, l2 = 0.0;
  for (const auto& l : p.layers) {
    l1 += l.W.cwiseAbs().sum();
    l2 += l.W.squaredNorm();
  }
  return w.nu1 * l1 + w.nu2 * l2;
}

inline void check_batch(const MlpParams& p, const Matrix& x, const Matrix& targets) {
  if (x.rows() != targets.rows()) {
    throw std::invalid_argument("ae_loss: input and target row counts differ");
  }
  if (targets.cols() != p.output_dim()) {
    throw std::invalid_argument("ae_loss: target width does not match model output");
  }
}

}  // namespace detail

// Reconstruction term: sum over entries of b * (xhat - t)^2, with b = beta on
// entries whose target is positive and 1 elsewhere. Plus nu1 * sum|W| and
// nu2 * sum W^2 over all weight matrices (biases unregularized).
inline double reconstruction_error(const Matrix& xhat, const Matrix& targets, double beta) {
  return (detail::penalty_weights(targets, beta).array() * (xhat - targets).array().square())
      .sum();
}

inline double ae_loss(const MlpParams& p, const Matrix& x, const Matrix& targets,
                      const AeLossWeights& w) {
  detail::check_batch(p, x, targets);
  const auto fp = forward_batch(p, x);
  return reconstruction_error(fp.output(), targets, w.beta) + detail::regularizer(p, w);
}

struct MlpGradient {
  std::vector<Matrix> dW;
  std::vector<Vector> db;
};

// Backpropagation of ae_loss. The L1 subgradient uses sign(W) with sign(0) = 0.
inline MlpGradient ae_gradient(const MlpParams& p, const Matrix& x, const Matrix& targets,
                               const AeLossWeights& w, double* loss_out = nullptr) {
  detail::check_batch(p, x, targets);
  const auto fp = forward_batch(p, x);
  const Matrix weights = detail::penalty_weights(targets, w.beta);
  const Matrix diff = fp.output() - targets;
  if (loss_out != nullptr) {
    *loss_out = (weights.array() * diff.array().square()).sum() + detail::regularizer(p, w);
  }

  MlpGradient g;
  g.dW.resize(p.layers.size());
  g.db.resize(p.layers.size());
  Matrix delta = 2.0 * weights.cwiseProduct(diff);  // dL/d(output)
  for (std::size_t i = p.layers.size(); i-- > 0;) {
    const DenseLayer& layer = p.layers[i];
    const Matrix& out = fp.activations[i + 1];
    if (layer.activation == Activation::kSigmoid) {
      delta = delta.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
    }
    g.dW[i] = delta.transpose() * fp.activations[i];
    g.db[i] = delta.colwise().sum().transpose();
    g.dW[i] += w.nu1 * layer.W.unaryExpr([](double v) {
      return static_cast<double>((v > 0.0) - (v < 0.0));
    });
    g.dW[i] += 2.0 * w.nu2 * layer.W;
    if (i > 0) delta = delta * layer.W;
  }
  return g;
}

inline void gradient_step(MlpParams& p, const MlpGradient& g, double rate) {
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    p.layers[i].W -= rate * g.dW[i];
    p.layers[i].b -= rate * g.db[i];
  }
}

// Model file: "L", then per layer (encoder first) "rows cols", the weights
// row-major one row per line, and the bias as one line.
inline std::string format_model(const MlpParams& p) {
  std::string out = std::to_string(p.layers.size()) + "\n";
  for (const auto& l : p.layers) {
    text::append_matrix(out, l.W);
    for (Eigen::Index i = 0; i < l.b.size(); ++i) {
      if (i) out += ' ';
      out += text::format_double(l.b(i));
    }
    out += '\n';
  }
  return out;
}

inline MlpParams parse_model(const std::string& content, std::size_t encoder_layers,
                             const std::string& source = "model") {
  text::TokenReader in(content, source);
  const auto n_layers = in.next<std::size_t>("layer count");
  if (encoder_layers < 1 || encoder_layers >= n_layers) {
    in.fail("encoder layer count " + std::to_string(encoder_layers) +
            " incompatible with " + std::to_string(n_layers) + " layers");
  }
  MlpParams p;
  p.encoder_layers = encoder_layers;
  for (std::size_t i = 0; i < n_layers; ++i) {
    DenseLayer l;
    l.W = text::read_matrix(in);
    l.b.resize(l.W.rows());
    for (Eigen::Index j = 0; j < l.b.size(); ++j) l.b(j) = in.next<double>("bias");
    if (!p.layers.empty() && p.layers.back().W.rows() != l.W.cols()) {
      in.fail("layer " + std::to_string(i) + " input width does not chain");
    }
    p.layers.push_back(std::move(l));
  }
  if (!in.at_end()) in.fail("trailing data after model");
  set_activations(p);
  return p;
}

}  // namespace dyngem
