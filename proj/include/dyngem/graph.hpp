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
#include <span>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dyngem/types.hpp"

namespace dyngem {

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool edge_key_less(const Edge& a, const Edge& b) {
  return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

inline constexpr std::size_t kDefaultDenseLimit = 20000;

// Weighted directed graph over nodes [0, n). Edges are kept sorted by (u, v)
// with a row index, so an out-row is a contiguous range. Weight 0 means "no
// edge"; stored weights are strictly positive.
class GraphSnapshot {
 public:
  GraphSnapshot() = default;

  GraphSnapshot(NodeId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 0) throw std::invalid_argument("GraphSnapshot: negative node count");
    std::sort(edges_.begin(), edges_.end(), edge_key_less);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
        throw std::out_of_range("GraphSnapshot: edge (" + std::to_string(e.u) + "," +
                                std::to_string(e.v) + ") outside node range");
      }
      if (!(e.w > 0.0)) {
        throw std::invalid_argument("GraphSnapshot: edge (" + std::to_string(e.u) + "," +
                                    std::to_string(e.v) + ") has non-positive weight");
      }
      if (i > 0 && edges_[i - 1].u == e.u && edges_[i - 1].v == e.v) {
        throw std::invalid_argument("GraphSnapshot: duplicate edge (" + std::to_string(e.u) +
                                    "," + std::to_string(e.v) + ")");
      }
    }
    row_start_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : edges_) ++row_start_[static_cast<std::size_t>(e.u) + 1];
    for (std::size_t i = 1; i < row_start_.size(); ++i) row_start_[i] += row_start_[i - 1];
  }

  NodeId num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const Edge> out_edges(NodeId u) const {
    const auto b = row_start_[static_cast<std::size_t>(u)];
    const auto e = row_start_[static_cast<std::size_t>(u) + 1];
    return {edges_.data() + b, e - b};
  }

  // 0 when absent.
  double weight(NodeId u, NodeId v) const {
    const auto row = out_edges(u);
    const auto it = std::lower_bound(row.begin(), row.end(), v,
                                     [](const Edge& e, NodeId x) { return e.v < x; });
    return (it != row.end() && it->v == v) ? it->w : 0.0;
  }

  bool has_edge(NodeId u, NodeId v) const { return weight(u, v) > 0.0; }

  double out_strength(NodeId u) const {
    double s = 0.0;
    for (const Edge& e : out_edges(u)) s += e.w;
    return s;
  }

  friend bool operator==(const GraphSnapshot& a, const GraphSnapshot& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  NodeId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> row_start_{0};
};

// Ordered snapshots over a fixed node set.
class SnapshotSequence {
 public:
  SnapshotSequence() = default;

  explicit SnapshotSequence(std::vector<GraphSnapshot> snapshots)
      : snapshots_(std::move(snapshots)) {
    if (snapshots_.empty()) throw std::invalid_argument("SnapshotSequence: no snapshots");
    for (const auto& g : snapshots_) {
      if (g.num_nodes() != snapshots_.front().num_nodes()) {
        throw std::invalid_argument("SnapshotSequence: snapshots disagree on node count");
      }
    }
  }

  std::size_t length() const { return snapshots_.size(); }
  NodeId num_nodes() const { return snapshots_.empty() ? 0 : snapshots_.front().num_nodes(); }
  const GraphSnapshot& operator[](std::size_t t) const { return snapshots_[t]; }
  const GraphSnapshot& at(std::size_t t) const { return snapshots_.at(t); }
  const std::vector<GraphSnapshot>& snapshots() const { return snapshots_; }

  // First `count` snapshots.
  SnapshotSequence prefix(std::size_t count) const {
    if (count == 0 || count > snapshots_.size()) {
      throw std::out_of_range("SnapshotSequence::prefix: bad length");
    }
    return SnapshotSequence({snapshots_.begin(), snapshots_.begin() + count});
  }

  friend bool operator==(const SnapshotSequence&, const SnapshotSequence&) = default;

 private:
  std::vector<GraphSnapshot> snapshots_;
};

struct Reweight {
  NodeId u = 0;
  NodeId v = 0;
  double w_old = 0.0;
  double w_new = 0.0;

  friend bool operator==(const Reweight&, const Reweight&) = default;
};

// Difference between two snapshots of equal node count. All lists are sorted
// by (u, v); touched_rows is sorted ascending.
struct EdgeDelta {
  NodeId n = 0;
  std::vector<Edge> added;
  std::vector<Edge> removed;  // w holds the old weight
  std::vector<Reweight> reweighted;
  std::vector<NodeId> touched_rows;

  bool empty() const { return added.empty() && removed.empty() && reweighted.empty(); }
};

inline EdgeDelta edge_delta(const GraphSnapshot& prev, const GraphSnapshot& next) {
  if (prev.num_nodes() != next.num_nodes()) {
    throw std::invalid_argument("edge_delta: node counts differ (" +
                                std::to_string(prev.num_nodes()) + " vs " +
                                std::to_string(next.num_nodes()) + ")");
  }
  EdgeDelta delta;
  delta.n = prev.num_nodes();
  const auto& a = prev.edges();
  const auto& b = next.edges();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && edge_key_less(a[i], b[j]))) {
      delta.removed.push_back(a[i++]);
    } else if (i == a.size() || edge_key_less(b[j], a[i])) {
      delta.added.push_back(b[j++]);
    } else {
      if (a[i].w != b[j].w) delta.reweighted.push_back({a[i].u, a[i].v, a[i].w, b[j].w});
      ++i;
      ++j;
    }
  }
  for (const auto& e : delta.added) delta.touched_rows.push_back(e.u);
  for (const auto& e : delta.removed) delta.touched_rows.push_back(e.u);
  for (const auto& r : delta.reweighted) delta.touched_rows.push_back(r.u);
  std::sort(delta.touched_rows.begin(), delta.touched_rows.end());
  delta.touched_rows.erase(std::unique(delta.touched_rows.begin(), delta.touched_rows.end()),
                           delta.touched_rows.end());
  return delta;
}

inline GraphSnapshot apply_delta(const GraphSnapshot& g, const EdgeDelta& delta) {
  if (g.num_nodes() != delta.n) throw std::invalid_argument("apply_delta: node counts differ");
  std::vector<Edge> out;
  out.reserve(g.num_edges() + delta.added.size());
  std::size_t r = 0, w = 0;
  for (const Edge& e : g.edges()) {
    while (r < delta.removed.size() && edge_key_less(delta.removed[r], e)) ++r;
    if (r < delta.removed.size() && delta.removed[r].u == e.u && delta.removed[r].v == e.v) {
      continue;
    }
    Edge copy = e;
    while (w < delta.reweighted.size() &&
           std::tie(delta.reweighted[w].u, delta.reweighted[w].v) < std::tie(e.u, e.v)) {
      ++w;
    }
    if (w < delta.reweighted.size() && delta.reweighted[w].u == e.u &&
        delta.reweighted[w].v == e.v) {
      copy.w = delta.reweighted[w].w_new;
    }
    out.push_back(copy);
  }
  out.insert(out.end(), delta.added.begin(), delta.added.end());
  return GraphSnapshot(g.num_nodes(), std::move(out));
}

inline Matrix dense_adjacency(const GraphSnapshot& g,
                              std::size_t dense_limit = kDefaultDenseLimit) {
  if (static_cast<std::size_t>(g.num_nodes()) > dense_limit) {
    throw std::length_error("dense_adjacency: " + std::to_string(g.num_nodes()) +
                            " nodes exceeds dense limit " + std::to_string(dense_limit));
  }
  Matrix a = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (const Edge& e : g.edges()) a(e.u, e.v) = e.w;
  return a;
}

}  // namespace dyngem
