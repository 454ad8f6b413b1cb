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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dyngem/linalg.hpp"
#include "dyngem/sbm.hpp"
#include "dyngem/svd_embed.hpp"

using namespace dyngem;

namespace {

DynamicSbmSeries small_series(std::uint64_t seed, int n = 40, int length = 5) {
  SbmParams p;
  p.node_num = n;
  p.community_num = 2;
  p.length = length;
  p.node_change_num = 2;
  p.p_in = 0.3;
  p.p_out = 0.05;
  p.seed = seed;
  return diminish_series(p);
}

// Optimal rank-d loss from the eigenvalues of A^T A.
double oracle_optimal_loss(const Matrix& a, Eigen::Index d) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  const Vector ev = eig.eigenvalues().reverse().cwiseMax(0.0);
  return ev.tail(ev.size() - d).sum();
}

}  // namespace

TEST(OptimalSvd, EmbeddingProductIsBestRankD) {
  const auto s = small_series(1);
  const Matrix a = dense_adjacency(s.sequence[0]);
  for (Eigen::Index d : {2, 6, 12}) {
    const auto e = optimal_svd_embed(s.sequence[0], d);
    EXPECT_EQ(e.src.cols(), d);
    const double loss = (a - e.src * e.tgt.transpose()).squaredNorm();
    EXPECT_NEAR(loss, oracle_optimal_loss(a, d), 1e-8 * (1.0 + loss));
    EXPECT_NEAR(e.state.cur_loss, loss, 1e-8 * (1.0 + loss));
  }
}

TEST(OptimalSvd, RejectsBadDimension) {
  const auto s = small_series(1);
  EXPECT_THROW(optimal_svd_embed(s.sequence[0], 0), std::invalid_argument);
  EXPECT_THROW(optimal_svd_embed(s.sequence[0], 41), std::invalid_argument);
}

TEST(DeltaFactor, ProductEqualsAdjacencyDifference) {
  const auto s = small_series(2);
  for (std::size_t t = 1; t < s.sequence.length(); ++t) {
    const auto delta = edge_delta(s.sequence[t - 1], s.sequence[t]);
    const auto f = delta_factor(delta, s.sequence.num_nodes());
    EXPECT_EQ(f.P.cols(), static_cast<Eigen::Index>(delta.touched_rows.size()));
    const Matrix diff = dense_adjacency(s.sequence[t]) - dense_adjacency(s.sequence[t - 1]);
    EXPECT_LT((f.P * f.Q.transpose() - diff).cwiseAbs().maxCoeff(), 1e-15);
  }
}

// With tracked_rank == d the update equals the rank-d truncation of
// U S V^T + P Q^T, computed here directly.
TEST(IncrementalUpdate, MatchesDirectRetruncation) {
  const auto s = small_series(3);
  const Eigen::Index d = 6;
  auto state = optimal_svd_embed(s.sequence[0], d, 0, d).state;
  for (std::size_t t = 1; t < s.sequence.length(); ++t) {
    const auto f = delta_factor(edge_delta(s.sequence[t - 1], s.sequence[t]), s.sequence.num_nodes());
    const Matrix target = state.factor.reconstruct() + f.P * f.Q.transpose();
    const auto expected = truncated_svd(target, d);
    state = incremental_update(state, f);
    EXPECT_EQ(state.t, t);
    EXPECT_LT((state.factor.reconstruct() - expected.reconstruct()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((state.factor.S - expected.S).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(orthonormality_error(state.factor.U), 1e-10);
    EXPECT_LT(orthonormality_error(state.factor.V), 1e-10);
  }
}

TEST(IncrementalUpdate, EmptyDeltaOnlyAdvancesTime) {
  const auto s = small_series(4);
  const auto state = optimal_svd_embed(s.sequence[0], 4).state;
  const auto next = incremental_update(state, Matrix(40, 0), Matrix(40, 0), 4);
  EXPECT_EQ(next.t, state.t + 1);
  EXPECT_EQ(next.factor.U, state.factor.U);
  EXPECT_EQ(next.cur_loss, state.cur_loss);
  EXPECT_EQ(next.pert_norm_sum, state.pert_norm_sum);
}

TEST(IncrementalUpdate, FullRankTracksExactly) {
  const auto s = small_series(5, 20);
  auto state = optimal_svd_embed(s.sequence[0], 20).state;
  for (std::size_t t = 1; t < s.sequence.length(); ++t) {
    state = incremental_update(state, delta_factor(edge_delta(s.sequence[t - 1], s.sequence[t]), 20));
    EXPECT_LT((state.factor.reconstruct() - dense_adjacency(s.sequence[t])).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(state.cur_loss, 1e-16);
  }
}

TEST(IncrementalUpdate, PerturbationNormIsFrobenius) {
  const auto s = small_series(6);
  const auto state = optimal_svd_embed(s.sequence[0], 4).state;
  const auto f = delta_factor(edge_delta(s.sequence[0], s.sequence[1]), 40);
  const auto next = incremental_update(state, f);
  EXPECT_NEAR(next.pert_norm_sum, (f.P * f.Q.transpose()).norm(), 1e-12);
}

TEST(IncrementalUpdate, RejectsMismatchedFactors) {
  const auto s = small_series(6);
  const auto state = optimal_svd_embed(s.sequence[0], 4).state;
  EXPECT_THROW(incremental_update(state, Matrix::Zero(40, 2), Matrix::Zero(40, 3), 4),
               std::invalid_argument);
  EXPECT_THROW(incremental_update(state, Matrix::Zero(39, 2), Matrix::Zero(40, 2), 4),
               std::invalid_argument);
}

// The bound never exceeds the true optimal loss (Weyl).
TEST(RestartBound, IsALowerBoundOnOptimalLoss) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = small_series(seed);
    const Eigen::Index d = 5;
    auto state = optimal_svd_embed(s.sequence[0], d).state;
    for (std::size_t t = 1; t < s.sequence.length(); ++t) {
      state = incremental_update(state, delta_factor(edge_delta(s.sequence[t - 1], s.sequence[t]), 40));
      const double opt = oracle_optimal_loss(dense_adjacency(s.sequence[t]), d);
      EXPECT_LE(restart_loss_bound(state), opt + 1e-9);
      EXPECT_GE(state.cur_loss, opt - 1e-9);
    }
  }
}

TEST(RestartBound, AtRestartEqualsOptimalLoss) {
  const auto s = small_series(7);
  const auto state = optimal_svd_embed(s.sequence[0], 5).state;
  EXPECT_NEAR(restart_loss_bound(state), state.cur_loss, 1e-8 * state.cur_loss);
}

TEST(RerunSvd, InfiniteThetaEqualsIncremental) {
  const auto s = small_series(8);
  const auto inc = incremental_svd_series(s.sequence, 5);
  const auto rerun = rerun_svd_series(s.sequence, 5, std::numeric_limits<double>::infinity());
  EXPECT_EQ(rerun.restart_count(), 0u);
  for (std::size_t t = 0; t < s.sequence.length(); ++t) {
    EXPECT_EQ(inc.series.at(t).src, rerun.series.at(t).src);
    EXPECT_EQ(inc.series.at(t).tgt, rerun.series.at(t).tgt);
  }
  EXPECT_EQ(rerun.series.config["theta"], "inf");
}

// Dense 40-node random digraph with three edge flips per step. The residual
// dwarfs the perturbation, so the restart bound stays positive.
SnapshotSequence dense_flips(std::uint64_t seed) {
  Rng rng(seed);
  const NodeId n = 40;
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && rng.uniform01() < 0.5) a[u][v] = 1;
  std::vector<GraphSnapshot> snapshots;
  for (int t = 0; t < 8; ++t) {
    for (int k = 0; t > 0 && k < 3; ++k) {
      const auto u = static_cast<NodeId>(rng.uniform_int(n));
      const auto v = static_cast<NodeId>(rng.uniform_int(n));
      if (u != v) a[u][v] ^= 1;
    }
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v)
        if (a[u][v]) edges.push_back({u, v, 1.0});
    snapshots.emplace_back(n, edges);
  }
  return SnapshotSequence(snapshots);
}

TEST(RerunSvd, DenseFixtureRestartsOnlyPastTolerance) {
  const auto seq = dense_flips(11);
  const auto tight = rerun_svd_series(seq, 4, 0.5, 4);
  EXPECT_EQ(tight.restart_count(), seq.length() - 1);
  for (const auto& e : tight.log) {
    const double opt = oracle_optimal_loss(dense_adjacency(seq[e.t]), 4);
    EXPECT_NEAR(e.cur_loss, opt, 1e-8 * opt) << "t=" << e.t;
  }
  const auto loose = rerun_svd_series(seq, 4, 1.0, 4);
  EXPECT_EQ(loose.restart_count(), 0u);
  ASSERT_GT(loose.log[1].bound, 0.0);
  EXPECT_LE(loose.log[1].cur_loss / loose.log[1].bound - 1.0, 1.0);
  EXPECT_GT(loose.log[1].cur_loss / loose.log[1].bound - 1.0, 0.5);
}

TEST(RerunSvd, RestartsRestoreOptimalityAndRespectTolerance) {
  const auto s = small_series(9, 40, 8);
  const double theta = 0.01;
  const auto r = rerun_svd_series(s.sequence, 4, theta, 4);
  EXPECT_EQ(r.log.size(), s.sequence.length());
  EXPECT_FALSE(r.log[0].restarted);
  for (const auto& e : r.log) {
    if (e.restarted) {
      const double opt = oracle_optimal_loss(dense_adjacency(s.sequence[e.t]), 4);
      EXPECT_NEAR(e.cur_loss, opt, 1e-8 * opt);
    } else if (e.bound > 0.0) {
      EXPECT_LE(e.cur_loss / e.bound - 1.0, theta);
    }
  }
  EXPECT_EQ(format_restart_log(r.log).substr(0, 4), "0 0 ");
}

TEST(RerunSvd, RejectsNonPositiveTheta) {
  const auto s = small_series(1);
  EXPECT_THROW(rerun_svd_series(s.sequence, 4, 0.0), std::invalid_argument);
}

TEST(LinkScores, AreDotProducts) {
  const auto s = small_series(10);
  const auto series = optimal_svd_series(s.sequence, 6);
  const auto scores = svd_link_scores(series, 2, {{0, 1}, {5, 7}});
  const Matrix full = score_matrix(series.at(2));
  EXPECT_DOUBLE_EQ(scores[0], full(0, 1));
  EXPECT_DOUBLE_EQ(scores[1], full(5, 7));
  EXPECT_THROW(svd_link_scores(series, 2, {{0, 40}}), std::out_of_range);
}

TEST(SplitEmbeddings, ReconstructFactor) {
  const auto s = small_series(11);
  const auto f = truncated_svd(dense_adjacency(s.sequence[0]), 7);
  const auto [src, tgt] = split_embeddings(f);
  EXPECT_LT((src * tgt.transpose() - f.reconstruct()).cwiseAbs().maxCoeff(), 1e-12);
}
