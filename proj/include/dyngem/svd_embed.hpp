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
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dyngem/embedding.hpp"
#include "dyngem/graph.hpp"
#include "dyngem/linalg.hpp"

namespace dyngem {

// Running truncated factorization of the current adjacency plus the
// bookkeeping needed to decide when to recompute it from scratch.
//
// The factor is tracked at rank tracked_rank >= d; embeddings and cur_loss
// use its leading d triplets. Tracking extra rank keeps the directions that a
// rank-d truncation would discard available to later updates.
struct SvdFactorState {
  TruncatedSvd factor;
  Eigen::Index d = 0;
  Eigen::Index tracked_rank = 0;
  std::size_t t = 0;
  std::size_t t_last_restart = 0;
  Vector sigma_restart;        // singular values at the last restart
  double pert_norm_sum = 0.0;  // sum of ||dA||_F since the last restart
  double cur_loss = 0.0;       // ||A_t - U_d S_d V_d^T||_F^2, exact
  Matrix adjacency;            // A_t

  TruncatedSvd leading() const {
    return {factor.U.leftCols(d), factor.S.head(d), factor.V.leftCols(d)};
  }
};

// Rank tracked by the incremental methods unless configured otherwise.
inline Eigen::Index default_tracked_rank(Eigen::Index n, Eigen::Index d) {
  return std::min(n, 4 * d);
}

struct SvdEmbedding {
  Matrix src;
  Matrix tgt;
  SvdFactorState state;
};

// Y_src = U sqrt(S), Y_tgt = V sqrt(S), so Y_src Y_tgt^T = U S V^T.
inline std::pair<Matrix, Matrix> split_embeddings(const TruncatedSvd& f) {
  const Vector root = f.S.cwiseMax(0.0).cwiseSqrt();
  return {f.U * root.asDiagonal(), f.V * root.asDiagonal()};
}

// tracked_rank 0 means d.
inline SvdFactorState restart_state(Matrix adjacency, Eigen::Index d, std::size_t t,
                                    Eigen::Index tracked_rank = 0) {
  SvdFactorState s;
  s.tracked_rank = std::max(d, tracked_rank);
  s.factor = truncated_svd(adjacency, s.tracked_rank);
  s.d = d;
  s.t = t;
  s.t_last_restart = t;
  s.sigma_restart = s.factor.S.head(d);
  s.pert_norm_sum = 0.0;
  s.cur_loss = reconstruction_loss(adjacency, s.leading());
  s.adjacency = std::move(adjacency);
  return s;
}

inline SvdEmbedding optimal_svd_embed(const GraphSnapshot& g, Eigen::Index d,
                                      std::size_t t = 0, Eigen::Index tracked_rank = 0) {
  if (d < 1 || d > g.num_nodes()) {
    throw std::invalid_argument("optimal_svd_embed: d=" + std::to_string(d) +
                                " outside [1, " + std::to_string(g.num_nodes()) + "]");
  }
  SvdEmbedding out;
  if (tracked_rank > g.num_nodes()) {
    throw std::invalid_argument("optimal_svd_embed: tracked rank exceeds node count");
  }
  out.state = restart_state(dense_adjacency(g), d, t, tracked_rank);
  std::tie(out.src, out.tgt) = split_embeddings(out.state.leading());
  return out;
}

// dA = P Q^T with one column per touched row u: P(:,j) = e_u and Q(:,j) the
// change of row u.
struct DeltaFactors {
  Matrix P;
  Matrix Q;
};

inline DeltaFactors delta_factor(const EdgeDelta& delta, NodeId n) {
  const auto k = static_cast<Eigen::Index>(delta.touched_rows.size());
  if (k > n) throw std::invalid_argument("delta_factor: more touched rows than nodes");
  DeltaFactors f{Matrix::Zero(n, k), Matrix::Zero(n, k)};
  std::vector<Eigen::Index> column(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 0; j < k; ++j) {
    const NodeId u = delta.touched_rows[j];
    if (u < 0 || u >= n) throw std::out_of_range("delta_factor: touched row out of range");
    column[u] = j;
    f.P(u, j) = 1.0;
  }
  auto col_of = [&](NodeId u) {
    if (column[u] < 0) throw std::invalid_argument("delta_factor: edge row not marked touched");
    return column[u];
  };
  for (const Edge& e : delta.added) f.Q(e.v, col_of(e.u)) += e.w;
  for (const Edge& e : delta.removed) f.Q(e.v, col_of(e.u)) -= e.w;
  for (const Reweight& r : delta.reweighted) f.Q(r.v, col_of(r.u)) += r.w_new - r.w_old;
  return f;
}

namespace detail {

// X = B proj + R coeff with R orthonormal and orthogonal to B. Residual
// columns whose norm falls below drop_tol add no basis vector.
struct ResidualSplit {
  Matrix proj;   // B^T X
  Matrix basis;  // n x p
  Matrix coeff;  // p x k
};

inline ResidualSplit split_against(const Matrix& b, const Matrix& x, double drop_tol = 1e-12) {
  ResidualSplit out;
  out.proj = b.transpose() * x;
  Matrix r = x - b * out.proj;
  const Matrix again = b.transpose() * r;  // second pass against cancellation
  r -= b * again;
  out.proj += again;

  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  Matrix basis(n, k);
  Matrix coeff = Matrix::Zero(k, k);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector v = r.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < p; ++i) {
        const double c = basis.col(i).dot(v);
        v -= c * basis.col(i);
        coeff(i, j) += c;
      }
    }
    const double norm = v.norm();
    if (norm < drop_tol) continue;
    basis.col(p) = v / norm;
    coeff(p, j) = norm;
    ++p;
  }
  out.basis = basis.leftCols(p);
  out.coeff = coeff.topRows(p);
  return out;
}

// Rebuilds an exactly orthonormal factorization of U S V^T.
inline TruncatedSvd reorthogonalize(const TruncatedSvd& f) {
  Eigen::HouseholderQR<Matrix> qu(f.U);
  Eigen::HouseholderQR<Matrix> qv(f.V);
  const Eigen::Index d = f.S.size();
  const Matrix qu_thin = qu.householderQ() * Matrix::Identity(f.U.rows(), d);
  const Matrix qv_thin = qv.householderQ() * Matrix::Identity(f.V.rows(), d);
  const Matrix ru = qu.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Matrix rv = qv.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> core(ru * f.S.asDiagonal() * rv.transpose(),
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {qu_thin * core.matrixU(), core.singularValues(), qv_thin * core.matrixV()};
}

}  // namespace detail

inline constexpr double kOrthonormalityTolerance = 1e-10;

// Additive rank-k modification: given the tracked factor U S V^T ~ A,
// returns the exact SVD of U S V^T + P Q^T, computed in the span of
// [U, P] x [V, Q] and truncated to max(d, state.tracked_rank). With
// tracked_rank == d this is the plain rank-d re-truncation.
inline SvdFactorState incremental_update(const SvdFactorState& state, const Matrix& p,
                                         const Matrix& q, Eigen::Index d) {
  const Eigen::Index n = state.factor.U.rows();
  if (p.rows() != n || q.rows() != state.factor.V.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("incremental_update: perturbation factors have wrong shape");
  }
  if (d < 1 || d > std::min(n, state.factor.V.rows())) {
    throw std::invalid_argument("incremental_update: rank out of range");
  }
  SvdFactorState next = state;
  next.t = state.t + 1;
  if (p.cols() == 0) return next;

  const TruncatedSvd& f = state.factor;
  const auto left = detail::split_against(f.U, p);
  const auto right = detail::split_against(f.V, q);
  const Eigen::Index r = f.S.size();
  const Eigen::Index pl = left.basis.cols();
  const Eigen::Index pr = right.basis.cols();

  Matrix core = Matrix::Zero(r + pl, r + pr);
  core.topLeftCorner(r, r) = f.S.asDiagonal();
  Matrix lcoef(r + pl, p.cols());
  lcoef << left.proj, left.coeff;
  Matrix rcoef(r + pr, q.cols());
  rcoef << right.proj, right.coeff;
  core += lcoef * rcoef.transpose();

  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix ubig(n, r + pl);
  ubig << f.U, left.basis;
  Matrix vbig(f.V.rows(), r + pr);
  vbig << f.V, right.basis;

  const Eigen::Index rank = std::max(d, state.tracked_rank);
  const Eigen::Index keep = std::min<Eigen::Index>(rank, svd.singularValues().size());
  TruncatedSvd updated{ubig * svd.matrixU().leftCols(keep), svd.singularValues().head(keep),
                       vbig * svd.matrixV().leftCols(keep)};
  if (orthonormality_error(updated.U) > kOrthonormalityTolerance ||
      orthonormality_error(updated.V) > kOrthonormalityTolerance) {
    updated = detail::reorthogonalize(updated);
  }

  next.factor = std::move(updated);
  next.d = d;
  next.tracked_rank = rank;
  next.pert_norm_sum +=
      std::sqrt(std::max(0.0, ((p.transpose() * p).cwiseProduct(q.transpose() * q)).sum()));
  next.adjacency += p * q.transpose();
  next.cur_loss = reconstruction_loss(next.adjacency, next.leading());
  return next;
}

inline SvdFactorState incremental_update(const SvdFactorState& state, const DeltaFactors& delta) {
  return incremental_update(state, delta.P, delta.Q, state.d);
}

// Lower bound on the optimal rank-d loss at the current step. Weyl's
// inequality with ||dA||_2 <= ||dA||_F gives sigma_i(A_t) <= sigma_i(A_restart)
// + pert_norm_sum, hence
//   min rank-d loss = ||A_t||_F^2 - sum sigma_i(A_t)^2
//                  >= ||A_t||_F^2 - sum (sigma_i(A_restart) + pert_norm_sum)^2.
inline double restart_loss_bound(const SvdFactorState& s) {
  double top = 0.0;
  for (Eigen::Index i = 0; i < s.sigma_restart.size(); ++i) {
    const double sigma = std::max(0.0, s.sigma_restart(i) + s.pert_norm_sum);
    top += sigma * sigma;
  }
  return std::max(0.0, s.adjacency.squaredNorm() - top);
}

struct RestartLogEntry {
  std::size_t t = 0;
  bool restarted = false;
  double cur_loss = 0.0;
  double bound = 0.0;
};

struct SvdSeriesResult {
  EmbeddingSeries series;
  std::vector<RestartLogEntry> log;

  std::size_t restart_count() const {
    std::size_t c = 0;
    for (const auto& e : log) c += e.restarted ? 1 : 0;
    return c;
  }
};

// Restart log: "t restarted cur_loss bound" per snapshot.
inline std::string format_restart_log(const std::vector<RestartLogEntry>& log) {
  std::string out;
  for (const auto& e : log) {
    out += std::to_string(e.t) + " " + (e.restarted ? "1" : "0") + " " +
           text::format_double(e.cur_loss) + " " + text::format_double(e.bound) + "\n";
  }
  return out;
}

inline EmbeddingSeries optimal_svd_series(const SnapshotSequence& seq, Eigen::Index d) {
  EmbeddingSeries series;
  series.method = "optsvd";
  series.config = {{"d", d}};
  for (std::size_t t = 0; t < seq.length(); ++t) {
    auto e = optimal_svd_embed(seq[t], d, t);
    series.push(t, std::move(e.src), std::move(e.tgt));
  }
  return series;
}

// tracked_rank 0 selects default_tracked_rank.
inline SvdSeriesResult incremental_svd_series(const SnapshotSequence& seq, Eigen::Index d,
                                              Eigen::Index tracked_rank = 0) {
  if (tracked_rank == 0) tracked_rank = default_tracked_rank(seq.num_nodes(), d);
  SvdSeriesResult out;
  out.series.method = "incsvd";
  out.series.config = {{"d", d}, {"tracked_rank", tracked_rank}};
  auto first = optimal_svd_embed(seq[0], d, 0, tracked_rank);
  SvdFactorState state = std::move(first.state);
  out.series.push(0, std::move(first.src), std::move(first.tgt));
  out.log.push_back({0, false, state.cur_loss, restart_loss_bound(state)});
  for (std::size_t t = 1; t < seq.length(); ++t) {
    state = incremental_update(state, delta_factor(edge_delta(seq[t - 1], seq[t]),
                                                   seq.num_nodes()));
    auto [src, tgt] = split_embeddings(state.leading());
    out.series.push(t, std::move(src), std::move(tgt));
    out.log.push_back({t, false, state.cur_loss, restart_loss_bound(state)});
  }
  return out;
}

// Incremental updates with a restart whenever the maintained loss exceeds the
// lower bound on the optimal loss by more than the relative tolerance theta:
// restart iff bound > 0 and cur_loss / bound - 1 > theta.
inline SvdSeriesResult rerun_svd_series(const SnapshotSequence& seq, Eigen::Index d,
                                        double theta, Eigen::Index tracked_rank = 0) {
  if (!(theta > 0.0)) throw std::invalid_argument("rerun_svd_series: theta must be positive");
  if (tracked_rank == 0) tracked_rank = default_tracked_rank(seq.num_nodes(), d);
  SvdSeriesResult out;
  out.series.method = "rerunsvd";
  out.series.config = {{"d", d},
                       {"theta", std::isinf(theta) ? nlohmann::ordered_json("inf")
                                                   : nlohmann::ordered_json(theta)},
                       {"tracked_rank", tracked_rank}};
  auto first = optimal_svd_embed(seq[0], d, 0, tracked_rank);
  SvdFactorState state = std::move(first.state);
  out.series.push(0, std::move(first.src), std::move(first.tgt));
  out.log.push_back({0, false, state.cur_loss, restart_loss_bound(state)});
  for (std::size_t t = 1; t < seq.length(); ++t) {
    state = incremental_update(state, delta_factor(edge_delta(seq[t - 1], seq[t]),
                                                   seq.num_nodes()));
    double bound = restart_loss_bound(state);
    bool restarted = false;
    if (bound > 0.0 && state.cur_loss / bound - 1.0 > theta) {
      state = restart_state(std::move(state.adjacency), d, t, tracked_rank);
      bound = restart_loss_bound(state);
      restarted = true;
    }
    auto [src, tgt] = split_embeddings(state.leading());
    out.series.push(t, std::move(src), std::move(tgt));
    out.log.push_back({t, restarted, state.cur_loss, bound});
  }
  return out;
}

// score(u, v) = Y_src(t)_u . Y_tgt(t)_v
inline std::vector<double> svd_link_scores(const EmbeddingSeries& series, std::size_t t,
                                           const std::vector<NodePair>& pairs) {
  const auto& e = series.at(t);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    if (u < 0 || u >= e.src.rows() || v < 0 || v >= e.tgt.rows()) {
      throw std::out_of_range("svd_link_scores: pair (" + std::to_string(u) + "," +
                              std::to_string(v) + ") out of range");
    }
    out.push_back(e.src.row(u).dot(e.tgt.row(v)));
  }
  return out;
}

inline Matrix score_matrix(const EmbeddingSnapshot& e) { return e.src * e.tgt.transpose(); }

}  // namespace dyngem
