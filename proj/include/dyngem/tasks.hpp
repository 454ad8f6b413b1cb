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
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dyngem/embedding.hpp"
#include "dyngem/graph.hpp"
#include "dyngem/linalg.hpp"
#include "dyngem/metrics.hpp"
#include "dyngem/rng.hpp"
#include "dyngem/sbm.hpp"
#include "dyngem/text_io.hpp"

namespace dyngem {

struct EvalReport {
  std::string task;
  std::string method;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::optional<std::size_t> t;
  std::string mode;
  std::vector<std::size_t> k_grid;
  std::vector<double> precision_at_k;
  std::optional<double> map;
  std::optional<double> micro_f1;
  std::optional<double> macro_f1;
  std::optional<double> migration_fraction;
  std::size_t n_truth = 0;
  std::size_t n_candidates = 0;
  bool empty = false;  // no truth pairs: ranking metrics undefined
};

// Stable key order; absent metrics are omitted.
inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  if (r.t) j["t"] = *r.t;
  if (!r.mode.empty()) j["mode"] = r.mode;
  j["k_grid"] = r.k_grid;
  j["precision_at_k"] = r.precision_at_k;
  if (r.map) j["map"] = *r.map;
  if (r.micro_f1) j["micro_f1"] = *r.micro_f1;
  if (r.macro_f1) j["macro_f1"] = *r.macro_f1;
  if (r.migration_fraction) j["migration_fraction"] = *r.migration_fraction;
  j["n_truth"] = r.n_truth;
  j["n_candidates"] = r.n_candidates;
  j["empty"] = r.empty;
  return j;
}

struct RankingMetrics {
  std::vector<std::size_t> k_grid;  // requested grid clipped to the candidate count
  std::vector<double> precision;
  std::optional<double> map;
  std::size_t n_truth = 0;
  std::size_t n_candidates = 0;
};

// Ranks every candidate pair (u, v) by scores(u, v), globally for precision@k
// and per source node for MAP. truth pairs need not all be candidates; each
// counts toward its source node's AP denominator.
template <typename IsCandidate>
RankingMetrics ranking_metrics(const Matrix& scores, const std::vector<NodePair>& truth,
                               IsCandidate is_candidate, std::vector<std::size_t> k_grid) {
  const auto n = static_cast<NodeId>(scores.rows());
  if (scores.cols() != scores.rows()) throw std::invalid_argument("ranking_metrics: scores not square");
  PairSet truth_set;
  std::vector<std::size_t> true_count(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : truth) {
    if (u < 0 || u >= n || v < 0 || v >= n) throw std::out_of_range("ranking_metrics: truth pair out of range");
    truth_set.insert(u, v);
    ++true_count[u];
  }

  std::vector<ScoredPair> all;
  std::vector<ScoredPairs> per_node(static_cast<std::size_t>(n));
  for (NodeId u = 0; u < n; ++u) {
    std::vector<ScoredPair> row;
    for (NodeId v = 0; v < n; ++v) {
      if (is_candidate(u, v)) row.push_back({u, v, scores(u, v)});
    }
    all.insert(all.end(), row.begin(), row.end());
    per_node[u] = ScoredPairs(std::move(row));
  }
  const ScoredPairs ranked(std::move(all));

  RankingMetrics m;
  m.n_truth = truth_set.size();
  m.n_candidates = ranked.size();
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
  for (std::size_t k : k_grid) {
    if (k >= 1 && k <= ranked.size()) m.k_grid.push_back(k);
  }
  m.precision = precision_curve(ranked, truth_set, m.k_grid);
  if (!truth_set.empty()) m.map = mean_average_precision(per_node, truth_set, true_count);
  return m;
}

inline void fill_ranking(EvalReport& r, const RankingMetrics& m) {
  r.k_grid = m.k_grid;
  r.precision_at_k = m.precision;
  r.map = m.map;
  r.n_truth = m.n_truth;
  r.n_candidates = m.n_candidates;
  r.empty = m.n_truth == 0;
}

// Ranks all off-diagonal pairs against the snapshot's (non-loop) edges.
inline EvalReport graph_reconstruction(const Matrix& scores, const GraphSnapshot& g,
                                       const std::vector<std::size_t>& k_grid) {
  if (scores.rows() != g.num_nodes()) throw std::invalid_argument("graph_reconstruction: size mismatch");
  std::vector<NodePair> truth;
  for (const Edge& e : g.edges()) {
    if (e.u != e.v) truth.emplace_back(e.u, e.v);
  }
  EvalReport r;
  r.task = "reconstruction";
  fill_ranking(r, ranking_metrics(scores, truth, [](NodeId u, NodeId v) { return u != v; }, k_grid));
  return r;
}

struct LinkSplit {
  GraphSnapshot train;
  std::vector<Edge> hidden;  // sorted by (u, v)
};

// Hides ceil(hide_fraction * |E|) edges chosen uniformly (partial
// Fisher-Yates over the sorted edge list). Nodes may end up isolated.
inline LinkSplit static_lp_split(const GraphSnapshot& g, double hide_fraction, Rng& rng) {
  if (!(hide_fraction > 0.0 && hide_fraction < 1.0)) {
    throw std::invalid_argument("static_lp_split: hide_fraction must lie in (0,1)");
  }
  const std::size_t m = g.num_edges();
  if (m < 2) throw std::invalid_argument("static_lp_split: graph needs at least 2 edges");
  const auto count = static_cast<std::size_t>(std::ceil(hide_fraction * static_cast<double>(m)));
  if (count >= m) throw std::invalid_argument("static_lp_split: would hide every edge");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_int(m - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<char> hide(m, 0);
  for (std::size_t i = 0; i < count; ++i) hide[idx[i]] = 1;
  LinkSplit out;
  std::vector<Edge> keep;
  for (std::size_t i = 0; i < m; ++i) {
    (hide[i] ? out.hidden : keep).push_back(g.edges()[i]);
  }
  out.train = GraphSnapshot(g.num_nodes(), std::move(keep));
  return out;
}

// Candidates are the off-diagonal non-edges of the training graph.
inline EvalReport static_lp_eval(const Matrix& scores, const LinkSplit& split,
                                 const std::vector<std::size_t>& k_grid) {
  std::vector<NodePair> truth;
  for (const Edge& e : split.hidden) {
    if (e.u != e.v) truth.emplace_back(e.u, e.v);
  }
  const GraphSnapshot& train = split.train;
  EvalReport r;
  r.task = "static_lp";
  fill_ranking(r, ranking_metrics(
                      scores, truth,
                      [&](NodeId u, NodeId v) { return u != v && !train.has_edge(u, v); }, k_grid));
  return r;
}

enum class TemporalMode { kAll, kNew };

inline std::string to_string(TemporalMode m) { return m == TemporalMode::kAll ? "all" : "new"; }

// scores(u, v) predicts snapshot t + 1 from information up to t.
// kAll: truth = edges of G_{t+1}, candidates = all u != v.
// kNew: truth = edges of G_{t+1} absent from G_t, candidates exclude G_t's edges.
inline EvalReport temporal_lp_eval(const Matrix& scores, const SnapshotSequence& seq,
                                   std::size_t t, const std::vector<std::size_t>& k_grid,
                                   TemporalMode mode) {
  if (t + 1 >= seq.length()) {
    throw std::out_of_range("temporal_lp_eval: snapshot " + std::to_string(t + 1) +
                            " does not exist");
  }
  if (scores.rows() != seq.num_nodes()) throw std::invalid_argument("temporal_lp_eval: size mismatch");
  const GraphSnapshot& now = seq[t];
  const GraphSnapshot& next = seq[t + 1];
  std::vector<NodePair> truth;
  for (const Edge& e : next.edges()) {
    if (e.u == e.v) continue;
    if (mode == TemporalMode::kNew && now.has_edge(e.u, e.v)) continue;
    truth.emplace_back(e.u, e.v);
  }
  EvalReport r;
  r.task = "temporal_lp";
  r.t = t;
  r.mode = to_string(mode);
  fill_ranking(r, ranking_metrics(
                      scores, truth,
                      [&](NodeId u, NodeId v) {
                        return u != v && (mode == TemporalMode::kAll || !now.has_edge(u, v));
                      },
                      k_grid));
  return r;
}

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// Single-label F1 over classes [0, n_classes). A class with no true, and no
// predicted, members has F1 0 and still counts toward the macro mean.
inline F1Scores f1_scores(const std::vector<int>& truth, const std::vector<int>& predicted,
                          int n_classes) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw std::invalid_argument("f1_scores: need equal, non-empty label vectors");
  }
  std::vector<double> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      tp[truth[i]] += 1;
    } else {
      fp[predicted[i]] += 1;
      fn[truth[i]] += 1;
    }
  }
  F1Scores s;
  double stp = 0, sfp = 0, sfn = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double denom = 2 * tp[c] + fp[c] + fn[c];
    s.macro += denom > 0 ? 2 * tp[c] / denom : 0.0;
    stp += tp[c];
    sfp += fp[c];
    sfn += fn[c];
  }
  s.macro /= n_classes;
  s.micro = 2 * stp / (2 * stp + sfp + sfn);
  return s;
}

struct ClassificationResult {
  F1Scores f1;
  std::vector<std::size_t> train_nodes;
  std::vector<std::size_t> test_nodes;
  std::vector<int> predicted;  // for test_nodes
};

// Fixed classifier settings so scores are comparable across methods.
struct LogisticSettings {
  int iterations = 500;
  double rate = 0.1;
  double l2 = 1e-4;
};

// Stratified split (per class: shuffle members, round(train_frac * size) to
// train), z-scored features using training statistics, one-vs-rest logistic
// regression by full-batch gradient descent, argmax prediction.
inline ClassificationResult node_classification(const Matrix& emb, const std::vector<int>& labels,
                                                double train_frac, Rng& rng,
                                                const LogisticSettings& lr = {}) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("node_classification: train_frac must lie in (0,1)");
  }
  if (static_cast<std::size_t>(emb.rows()) != labels.size()) {
    throw std::invalid_argument("node_classification: label count does not match embedding rows");
  }
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) throw std::invalid_argument("node_classification: need at least 2 classes");
  if (*classes.begin() < 0) throw std::invalid_argument("node_classification: negative label");
  const int n_classes = *classes.rbegin() + 1;

  ClassificationResult out;
  for (int c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_frac * static_cast<double>(members.size())));
    if (n_train == 0) {
      throw std::invalid_argument("node_classification: class " + std::to_string(c) +
                                  " absent from the training split");
    }
    out.train_nodes.insert(out.train_nodes.end(), members.begin(), members.begin() + n_train);
    out.test_nodes.insert(out.test_nodes.end(), members.begin() + n_train, members.end());
  }
  std::sort(out.train_nodes.begin(), out.train_nodes.end());
  std::sort(out.test_nodes.begin(), out.test_nodes.end());
  if (out.test_nodes.empty()) throw std::invalid_argument("node_classification: empty test split");

  const Eigen::Index d = emb.cols();
  const auto n_tr = static_cast<Eigen::Index>(out.train_nodes.size());
  Matrix x(n_tr, d);
  Matrix y = Matrix::Zero(n_tr, n_classes);
  for (Eigen::Index i = 0; i < n_tr; ++i) {
    x.row(i) = emb.row(out.train_nodes[i]);
    y(i, labels[out.train_nodes[i]]) = 1.0;
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd scale =
      ((x.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(n_tr)).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(scale(j) > 1e-12)) scale(j) = 1.0;
  }
  auto standardize = [&](const Matrix& m) {
    return Matrix((m.rowwise() - mean).array().rowwise() / scale.array());
  };
  x = standardize(x);

  Matrix w = Matrix::Zero(d, n_classes);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(n_classes);
  for (int it = 0; it < lr.iterations; ++it) {
    Matrix z = x * w;
    z.rowwise() += b;
    const Matrix p = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    const Matrix err = (p - y) / static_cast<double>(n_tr);
    w -= lr.rate * (x.transpose() * err + lr.l2 * w);
    b -= lr.rate * err.colwise().sum();
  }

  const auto n_te = static_cast<Eigen::Index>(out.test_nodes.size());
  Matrix xt(n_te, d);
  for (Eigen::Index i = 0; i < n_te; ++i) xt.row(i) = emb.row(out.test_nodes[i]);
  Matrix zt = standardize(xt) * w;
  zt.rowwise() += b;
  std::vector<int> truth;
  for (Eigen::Index i = 0; i < n_te; ++i) {
    Eigen::Index arg = 0;
    zt.row(i).maxCoeff(&arg);
    out.predicted.push_back(static_cast<int>(arg));
    truth.push_back(labels[out.test_nodes[i]]);
  }
  out.f1 = f1_scores(truth, out.predicted, n_classes);
  return out;
}

// Fraction of moved nodes strictly closer (Euclidean) to the centroid of
// their destination community than to that of their origin. Centroids use
// the rows of y of all nodes not in `moves`, grouped by `labels`.
inline double migration_proximity(const Matrix& y, const std::vector<int>& labels,
                                  const std::vector<Migration>& moves) {
  if (moves.empty()) throw std::invalid_argument("migration_proximity: no migrated nodes");
  if (static_cast<std::size_t>(y.rows()) != labels.size()) {
    throw std::invalid_argument("migration_proximity: label count does not match embedding rows");
  }
  std::vector<char> moved(labels.size(), 0);
  for (const auto& m : moves) moved.at(m.node) = 1;
  auto centroid = [&](int community) {
    Vector c = Vector::Zero(y.cols());
    std::size_t count = 0;
    for (std::size_t u = 0; u < labels.size(); ++u) {
      if (!moved[u] && labels[u] == community) {
        c += y.row(static_cast<Eigen::Index>(u)).transpose();
        ++count;
      }
    }
    if (count == 0) {
      throw std::invalid_argument("migration_proximity: community " + std::to_string(community) +
                                  " has no non-migrated members");
    }
    return Vector(c / static_cast<double>(count));
  };
  std::size_t closer = 0;
  for (const auto& m : moves) {
    const Vector row = y.row(m.node).transpose();
    const double to_dest = (row - centroid(m.to)).norm();
    const double to_origin = (row - centroid(m.from)).norm();
    closer += to_dest < to_origin ? 1 : 0;
  }
  return static_cast<double>(closer) / static_cast<double>(moves.size());
}

// Nodes that changed community entering snapshot t, measured on Y_src(t).
inline double migration_proximity_stat(const EmbeddingSeries& series,
                                       const std::vector<std::vector<int>>& labels,
                                       const std::vector<std::vector<Migration>>& migrated,
                                       std::size_t t) {
  return migration_proximity(series.at(t).src, labels.at(t), migrated.at(t));
}

// Nodes about to change community entering t + 1, measured on Y_src(t):
// whether the embedding at t already leans toward the destination.
inline double anticipation_proximity_stat(const EmbeddingSeries& series,
                                          const std::vector<std::vector<int>>& labels,
                                          const std::vector<std::vector<Migration>>& migrated,
                                          std::size_t t) {
  return migration_proximity(series.at(t).src, labels.at(t), migrated.at(t + 1));
}

// "node x y label migrated" per node, PCA coordinates of Y_src(t).
inline std::string format_projection(const Matrix& y, const std::vector<int>& labels,
                                     const std::vector<NodeId>& flagged) {
  if (static_cast<std::size_t>(y.rows()) != labels.size()) {
    throw std::invalid_argument("format_projection: label count does not match embedding rows");
  }
  Matrix coords;
  if (y.cols() >= 2) {
    coords = pca_project_2d(y).coords;
  } else {
    coords = Matrix::Zero(y.rows(), 2);
    if (y.rows() > 0) coords.col(0) = y.col(0).array() - y.col(0).mean();
  }
  std::vector<char> flag(labels.size(), 0);
  for (NodeId u : flagged) flag.at(u) = 1;
  std::string out;
  for (Eigen::Index u = 0; u < y.rows(); ++u) {
    out += std::to_string(u) + " " + text::format_double(coords(u, 0)) + " " +
           text::format_double(coords(u, 1)) + " " + std::to_string(labels[u]) + " " +
           (flag[u] ? "1" : "0") + "\n";
  }
  return out;
}

inline void export_projection(const EmbeddingSeries& series, std::size_t t,
                              const std::vector<int>& labels, const std::vector<NodeId>& flagged,
                              const std::string& path) {
  text::write_file(path, format_projection(series.at(t).src, labels, flagged));
}

}  // namespace dyngem
