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
#include <stdexcept>
#include <string>
#include <vector>

#include "dyngem/graph.hpp"
#include "dyngem/rng.hpp"
#include "dyngem/text_io.hpp"

namespace dyngem {

struct SbmParams {
  int node_num = 1000;
  int community_num = 2;
  int length = 4;
  int diminish_community = 1;
  int node_change_num = 10;
  double p_in = 0.1;
  double p_out = 0.01;
  std::uint64_t seed = 0;
};

// Communities are contiguous id ranges of size node_num / community_num; the
// remainder goes to the last community.
inline std::vector<int> initial_sbm_labels(int node_num, int community_num) {
  std::vector<int> labels(static_cast<std::size_t>(node_num));
  const int block = node_num / community_num;
  for (int u = 0; u < node_num; ++u) labels[u] = std::min(u / block, community_num - 1);
  return labels;
}

inline void validate(const SbmParams& p) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument("SbmParams: " + msg); };
  if (p.node_num < 1) bad("node_num must be positive");
  if (p.community_num < 2) bad("community_num must be at least 2");
  if (p.community_num > p.node_num) bad("community_num exceeds node_num");
  if (p.length < 1) bad("length must be positive");
  if (p.diminish_community < 0 || p.diminish_community >= p.community_num) {
    bad("diminish_community out of range");
  }
  if (!(p.p_in >= 0.0 && p.p_in <= 1.0 && p.p_out >= 0.0 && p.p_out <= 1.0)) {
    bad("edge probabilities must lie in [0,1]");
  }
  if (!(p.p_out < p.p_in)) bad("p_out must be strictly below p_in");
  const auto labels = initial_sbm_labels(p.node_num, p.community_num);
  const long size = std::count(labels.begin(), labels.end(), p.diminish_community);
  const long moves = static_cast<long>(p.node_change_num) * (p.length - 1);
  if (p.length > 1 && !(moves > 0 && moves < size)) {
    bad("need 0 < node_change_num*(length-1) < " + std::to_string(size) +
        " (initial size of the diminishing community)");
  }
  if (p.node_change_num < (p.length > 1 ? 1 : 0)) bad("node_change_num must be positive");
}

namespace detail {

inline double block_probability(int a, int b, double p_in, double p_out) {
  return a == b ? p_in : p_out;
}

}  // namespace detail

// Each ordered pair u != v draws one uniform in (u, v) lexicographic order;
// an edge of weight 1 exists when the draw falls below p_in (same community)
// or p_out (different communities).
inline GraphSnapshot generate_sbm_snapshot(const std::vector<int>& labels, double p_in,
                                           double p_out, Rng& rng) {
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0)) {
    throw std::invalid_argument("generate_sbm_snapshot: probabilities must lie in [0,1]");
  }
  const auto n = static_cast<NodeId>(labels.size());
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      if (rng.uniform01() < detail::block_probability(labels[u], labels[v], p_in, p_out)) {
        edges.push_back({u, v, 1.0});
      }
    }
  }
  return GraphSnapshot(n, std::move(edges));
}

struct Migration {
  NodeId node = 0;
  int from = 0;
  int to = 0;

  friend bool operator==(const Migration&, const Migration&) = default;
};

struct DynamicSbmSeries {
  SnapshotSequence sequence;
  std::vector<std::vector<int>> labels;          // labels[t][u]
  std::vector<std::vector<Migration>> migrated;  // migrated[t]: moves entering t, sorted by node

  std::vector<NodeId> migrated_nodes(std::size_t t) const {
    std::vector<NodeId> out;
    for (const auto& m : migrated.at(t)) out.push_back(m.node);
    return out;
  }
};

// Stream order per step t >= 1: node_change_num picks among the current
// members of the diminishing community (partial Fisher-Yates over the
// ascending member list), then one destination draw per picked node, then one
// uniform per ordered pair (u, v) touching a migrated node, in lexicographic
// order.
inline DynamicSbmSeries diminish_series(const SbmParams& params) {
  validate(params);
  Rng rng(params.seed);
  auto labels = initial_sbm_labels(params.node_num, params.community_num);
  const NodeId n = params.node_num;

  DynamicSbmSeries out;
  std::vector<GraphSnapshot> snapshots;
  snapshots.push_back(generate_sbm_snapshot(labels, params.p_in, params.p_out, rng));
  out.labels.push_back(labels);
  out.migrated.emplace_back();

  for (int t = 1; t < params.length; ++t) {
    std::vector<NodeId> members;
    for (NodeId u = 0; u < n; ++u) {
      if (labels[u] == params.diminish_community) members.push_back(u);
    }
    if (static_cast<int>(members.size()) <= params.node_change_num) {
      throw std::runtime_error("diminish_series: diminishing community exhausted at step " +
                               std::to_string(t));
    }
    for (int i = 0; i < params.node_change_num; ++i) {
      const auto j = i + rng.uniform_int(members.size() - i);
      std::swap(members[i], members[j]);
    }
    members.resize(params.node_change_num);
    std::vector<Migration> moves;
    for (NodeId u : members) {
      int to = static_cast<int>(rng.uniform_int(params.community_num - 1));
      if (to >= params.diminish_community) ++to;
      moves.push_back({u, params.diminish_community, to});
    }
    std::sort(moves.begin(), moves.end(),
              [](const Migration& a, const Migration& b) { return a.node < b.node; });

    std::vector<char> moved(n, 0);
    for (const auto& m : moves) {
      labels[m.node] = m.to;
      moved[m.node] = 1;
    }

    const GraphSnapshot& prev = snapshots.back();
    std::vector<Edge> edges;
    for (const Edge& e : prev.edges()) {
      if (!moved[e.u] && !moved[e.v]) edges.push_back(e);
    }
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        if (u == v || (!moved[u] && !moved[v])) continue;
        const double p = detail::block_probability(labels[u], labels[v], params.p_in,
                                                   params.p_out);
        if (rng.uniform01() < p) edges.push_back({u, v, 1.0});
      }
    }
    snapshots.emplace_back(n, std::move(edges));
    out.labels.push_back(labels);
    out.migrated.push_back(std::move(moves));
  }
  out.sequence = SnapshotSequence(std::move(snapshots));
  return out;
}

// Labels file: "t node community" per line, sorted by (t, node).
inline std::string format_labels(const std::vector<std::vector<int>>& labels) {
  std::string out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    for (std::size_t u = 0; u < labels[t].size(); ++u) {
      out += std::to_string(t) + " " + std::to_string(u) + " " + std::to_string(labels[t][u]) +
             "\n";
    }
  }
  return out;
}

// Migrations file: "t node old_community new_community", sorted by (t, node).
inline std::string format_migrations(const std::vector<std::vector<Migration>>& migrated) {
  std::string out;
  for (std::size_t t = 0; t < migrated.size(); ++t) {
    for (const auto& m : migrated[t]) {
      out += std::to_string(t) + " " + std::to_string(m.node) + " " + std::to_string(m.from) +
             " " + std::to_string(m.to) + "\n";
    }
  }
  return out;
}

inline std::vector<std::vector<int>> parse_labels(const std::string& content, std::size_t length,
                                                  NodeId n, const std::string& source) {
  std::vector<std::vector<int>> labels(length, std::vector<int>(n, -1));
  text::TokenReader in(content, source);
  while (!in.at_end()) {
    const auto t = in.next<long>("snapshot index");
    const auto u = in.next<long>("node id");
    const auto c = in.next<int>("community");
    if (t < 0 || t >= static_cast<long>(length)) in.fail("snapshot index out of range");
    if (u < 0 || u >= n) in.fail("node id out of range");
    if (c < 0) in.fail("negative community");
    labels[t][u] = c;
  }
  for (std::size_t t = 0; t < length; ++t) {
    for (NodeId u = 0; u < n; ++u) {
      if (labels[t][u] < 0) {
        in.fail("no label for node " + std::to_string(u) + " at t=" + std::to_string(t));
      }
    }
  }
  return labels;
}

inline std::vector<std::vector<Migration>> parse_migrations(const std::string& content,
                                                            std::size_t length, NodeId n,
                                                            const std::string& source) {
  std::vector<std::vector<Migration>> out(length);
  text::TokenReader in(content, source);
  while (!in.at_end()) {
    const auto t = in.next<long>("snapshot index");
    const auto u = in.next<long>("node id");
    const auto from = in.next<int>("old community");
    const auto to = in.next<int>("new community");
    if (t < 0 || t >= static_cast<long>(length)) in.fail("snapshot index out of range");
    if (u < 0 || u >= n) in.fail("node id out of range");
    out[t].push_back({static_cast<NodeId>(u), from, to});
  }
  for (auto& step : out) {
    std::sort(step.begin(), step.end(),
              [](const Migration& a, const Migration& b) { return a.node < b.node; });
  }
  return out;
}

}  // namespace dyngem
