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
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dyngem/graph.hpp"

namespace dyngem {

inline std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// Set of directed node pairs.
class PairSet {
 public:
  PairSet() = default;

  static PairSet from_graph(const GraphSnapshot& g) {
    PairSet s;
    for (const Edge& e : g.edges()) s.insert(e.u, e.v);
    return s;
  }

  void insert(NodeId u, NodeId v) { keys_.insert(pair_key(u, v)); }
  bool contains(NodeId u, NodeId v) const { return keys_.count(pair_key(u, v)) != 0; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

 private:
  std::unordered_set<std::uint64_t> keys_;
};

struct ScoredPair {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
};

// Candidate pairs ranked by descending score, ties broken by (u, v)
// ascending. Duplicate pairs are rejected.
class ScoredPairs {
 public:
  ScoredPairs() = default;

  explicit ScoredPairs(std::vector<ScoredPair> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end(), [](const ScoredPair& a, const ScoredPair& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.u != b.u) return a.u < b.u;
      return a.v < b.v;
    });
    if (pairs_.size() > 1) {
      std::unordered_set<std::uint64_t> seen;
      for (const auto& p : pairs_) {
        if (!seen.insert(pair_key(p.u, p.v)).second) {
          throw std::invalid_argument("ScoredPairs: duplicate pair (" + std::to_string(p.u) +
                                      "," + std::to_string(p.v) + ")");
        }
      }
    }
  }

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const ScoredPair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<ScoredPair>& ranked() const { return pairs_; }

 private:
  std::vector<ScoredPair> pairs_;
};

// Number of truth pairs among the top k.
inline std::size_t hits_at_k(const ScoredPairs& sp, const PairSet& truth, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += truth.contains(sp[i].u, sp[i].v) ? 1 : 0;
  return hits;
}

inline double precision_at_k(const ScoredPairs& sp, const PairSet& truth, std::size_t k) {
  if (k == 0 || k > sp.size()) {
    throw std::out_of_range("precision_at_k: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(sp.size()) + "]");
  }
  return static_cast<double>(hits_at_k(sp, truth, k)) / static_cast<double>(k);
}

// Precision at every k of the grid, in one pass.
inline std::vector<double> precision_curve(const ScoredPairs& sp, const PairSet& truth,
                                           const std::vector<std::size_t>& k_grid) {
  std::vector<double> out;
  std::size_t hits = 0, i = 0;
  for (std::size_t k : k_grid) {
    if (k == 0 || k > sp.size()) {
      throw std::out_of_range("precision_curve: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(sp.size()) + "]");
    }
    if (k < i) throw std::invalid_argument("precision_curve: k grid must be ascending");
    for (; i < k; ++i) hits += truth.contains(sp[i].u, sp[i].v) ? 1 : 0;
    out.push_back(static_cast<double>(hits) / static_cast<double>(k));
  }
  return out;
}

// Worker cap for metric computations: DYNGEM_THREADS if set, otherwise the
// hardware concurrency.
inline unsigned metric_workers() {
  if (const char* env = std::getenv("DYNGEM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on up to metric_workers() threads.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(metric_workers(), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

// AP of one ranking against the number of truth pairs owned by its node.
inline double average_precision(const ScoredPairs& sp, const PairSet& truth,
                                std::size_t n_true) {
  if (n_true == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (truth.contains(sp[i].u, sp[i].v)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(n_true);
}

// Mean of AP(u) over nodes with at least one truth pair; true_count[u] is the
// number of truth pairs with source u.
inline double mean_average_precision(const std::vector<ScoredPairs>& per_node,
                                     const PairSet& truth,
                                     const std::vector<std::size_t>& true_count) {
  if (per_node.size() != true_count.size()) {
    throw std::invalid_argument("mean_average_precision: size mismatch");
  }
  std::vector<double> ap(per_node.size(), 0.0);
  parallel_for(per_node.size(), [&](std::size_t u) {
    ap[u] = average_precision(per_node[u], truth, true_count[u]);
  });
  double sum = 0.0;
  std::size_t contributing = 0;
  for (std::size_t u = 0; u < ap.size(); ++u) {
    if (true_count[u] == 0) continue;
    sum += ap[u];
    ++contributing;
  }
  if (contributing == 0) {
    throw std::invalid_argument("mean_average_precision: no node has a true edge");
  }
  return sum / static_cast<double>(contributing);
}

}  // namespace dyngem
