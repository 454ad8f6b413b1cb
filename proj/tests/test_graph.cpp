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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>

#include "dyngem/graph.hpp"
#include "dyngem/rng.hpp"
#include "dyngem/snapshot_io.hpp"

using namespace dyngem;

namespace {

GraphSnapshot random_graph(NodeId n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (rng.uniform01() < p) edges.push_back({u, v, 1.0 + static_cast<double>(rng.uniform_int(3))});
    }
  }
  return GraphSnapshot(n, std::move(edges));
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Rng(42).next(), c.next());
}

TEST(Rng, Uniform01InUnitInterval) {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = r.uniform01();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(Rng, UniformIntCoversRange) {
  Rng r(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[r.uniform_int(7)];
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(7, s));
  EXPECT_EQ(seen.size(), 100u);
}

TEST(GraphSnapshot, SortsAndIndexesRows) {
  GraphSnapshot g(4, {{2, 1, 1.0}, {0, 3, 2.5}, {0, 1, 1.0}, {3, 3, 0.5}});
  EXPECT_EQ(g.num_edges(), 4u);
  EXPECT_EQ(g.edges().front(), (Edge{0, 1, 1.0}));
  EXPECT_EQ(g.out_edges(0).size(), 2u);
  EXPECT_EQ(g.out_edges(1).size(), 0u);
  EXPECT_DOUBLE_EQ(g.weight(0, 3), 2.5);
  EXPECT_DOUBLE_EQ(g.weight(3, 0), 0.0);
  EXPECT_TRUE(g.has_edge(3, 3));
  EXPECT_DOUBLE_EQ(g.out_strength(0), 3.5);
}

TEST(GraphSnapshot, RejectsBadEdges) {
  EXPECT_THROW(GraphSnapshot(3, {{0, 3, 1.0}}), std::out_of_range);
  EXPECT_THROW(GraphSnapshot(3, {{0, 1, 0.0}}), std::invalid_argument);
  EXPECT_THROW(GraphSnapshot(3, {{0, 1, -1.0}}), std::invalid_argument);
  EXPECT_THROW(GraphSnapshot(3, {{0, 1, 1.0}, {0, 1, 2.0}}), std::invalid_argument);
}

TEST(GraphSnapshot, EmptyGraph) {
  GraphSnapshot g(5, {});
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_TRUE(dense_adjacency(g).isZero());
}

TEST(SnapshotSequence, RejectsMismatchedNodeCounts) {
  EXPECT_THROW(SnapshotSequence({GraphSnapshot(3, {}), GraphSnapshot(4, {})}),
               std::invalid_argument);
  EXPECT_THROW(SnapshotSequence(std::vector<GraphSnapshot>{}), std::invalid_argument);
}

TEST(EdgeDelta, IdenticalSnapshotsGiveEmptyDelta) {
  Rng r(3);
  const auto g = random_graph(20, 0.2, r);
  const auto d = edge_delta(g, g);
  EXPECT_TRUE(d.empty());
  EXPECT_TRUE(d.touched_rows.empty());
}

TEST(EdgeDelta, ClassifiesChanges) {
  GraphSnapshot a(3, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 0, 1.0}});
  GraphSnapshot b(3, {{0, 1, 3.0}, {2, 0, 1.0}, {2, 1, 1.0}});
  const auto d = edge_delta(a, b);
  ASSERT_EQ(d.added.size(), 1u);
  EXPECT_EQ(d.added[0], (Edge{2, 1, 1.0}));
  ASSERT_EQ(d.removed.size(), 1u);
  EXPECT_EQ(d.removed[0], (Edge{1, 2, 2.0}));
  ASSERT_EQ(d.reweighted.size(), 1u);
  EXPECT_EQ(d.reweighted[0], (Reweight{0, 1, 1.0, 3.0}));
  EXPECT_EQ(d.touched_rows, (std::vector<NodeId>{0, 1, 2}));
}

// Oracle: the dense difference of the two adjacency matrices.
TEST(EdgeDelta, MatchesDenseDifferenceAndRoundTrips) {
  Rng r(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_graph(15, 0.15, r);
    const auto b = random_graph(15, 0.15, r);
    const auto d = edge_delta(a, b);
    Matrix diff = Matrix::Zero(15, 15);
    for (const auto& e : d.added) diff(e.u, e.v) += e.w;
    for (const auto& e : d.removed) diff(e.u, e.v) -= e.w;
    for (const auto& rw : d.reweighted) diff(rw.u, rw.v) += rw.w_new - rw.w_old;
    EXPECT_LT((diff - (dense_adjacency(b) - dense_adjacency(a))).norm(), 1e-12);
    EXPECT_EQ(apply_delta(a, d), b);
  }
}

TEST(EdgeDelta, NodeCountMismatchThrows) {
  EXPECT_THROW(edge_delta(GraphSnapshot(3, {}), GraphSnapshot(4, {})), std::invalid_argument);
}

TEST(DenseAdjacency, MatchesWeightsAndEnforcesLimit) {
  GraphSnapshot g(3, {{0, 2, 1.5}, {2, 2, 4.0}});
  const Matrix a = dense_adjacency(g);
  EXPECT_DOUBLE_EQ(a(0, 2), 1.5);
  EXPECT_DOUBLE_EQ(a(2, 2), 4.0);
  EXPECT_DOUBLE_EQ(a.sum(), 5.5);
  EXPECT_THROW(dense_adjacency(g, 2), std::length_error);
}

TEST(SnapshotIo, ParsesCommentsAndBlankLines) {
  const auto seq = parse_snapshots("# header follows\n2 3\n\n0 0 1 1\n1 2 0 0.5\n# end\n");
  ASSERT_EQ(seq.length(), 2u);
  EXPECT_EQ(seq.num_nodes(), 3);
  EXPECT_DOUBLE_EQ(seq[1].weight(2, 0), 0.5);
  EXPECT_EQ(seq[0].num_edges(), 1u);
}

TEST(SnapshotIo, RoundTripIsByteStable) {
  Rng r(21);
  const SnapshotSequence seq({random_graph(12, 0.3, r), random_graph(12, 0.3, r)});
  const std::string text = format_snapshots(seq);
  const auto back = parse_snapshots(text);
  EXPECT_EQ(back, seq);
  EXPECT_EQ(format_snapshots(back), text);
}

TEST(SnapshotIo, NonIntegerWeightsSurviveRoundTrip) {
  const SnapshotSequence seq({GraphSnapshot(2, {{0, 1, 0.1 + 0.2}, {1, 0, 1e-300}})});
  EXPECT_EQ(parse_snapshots(format_snapshots(seq)), seq);
}

TEST(SnapshotIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dyngem_graph_io_test.txt";
  const SnapshotSequence seq({GraphSnapshot(4, {{0, 1, 1.0}, {3, 2, 2.0}})});
  save_snapshots(seq, path.string());
  EXPECT_EQ(load_snapshots(path.string()), seq);
  std::filesystem::remove(path);
}

namespace {

void expect_parse_error(const std::string& text, ParseErrorKind kind, std::size_t line) {
  try {
    parse_snapshots(text);
    FAIL() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

}  // namespace

TEST(SnapshotIo, ErrorsCarryKindAndLine) {
  expect_parse_error("", ParseErrorKind::kMalformedHeader, 0);
  expect_parse_error("2\n", ParseErrorKind::kMalformedHeader, 1);
  expect_parse_error("0 3\n", ParseErrorKind::kMalformedHeader, 1);
  expect_parse_error("1 3\n0 1 2\n", ParseErrorKind::kMalformedLine, 2);
  expect_parse_error("1 3\n0 1 x 1\n", ParseErrorKind::kMalformedLine, 2);
  expect_parse_error("1 3\n0 1 3 1\n", ParseErrorKind::kNodeOutOfRange, 2);
  expect_parse_error("1 3\n0 -1 2 1\n", ParseErrorKind::kNodeOutOfRange, 2);
  expect_parse_error("1 3\n1 0 1 1\n", ParseErrorKind::kSnapshotOutOfRange, 2);
  expect_parse_error("1 3\n0 0 1 0\n", ParseErrorKind::kNonPositiveWeight, 2);
  expect_parse_error("1 3\n0 0 1 -2\n", ParseErrorKind::kNonPositiveWeight, 2);
  expect_parse_error("1 3\n0 0 1 1\n\n0 0 1 2\n", ParseErrorKind::kDuplicateEdge, 4);
}

TEST(SnapshotIo, MissingFileThrows) {
  EXPECT_THROW(load_snapshots("/nonexistent/dyngem/file.txt"), std::runtime_error);
}
