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
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dyngem/graph.hpp"
#include "dyngem/text_io.hpp"

namespace dyngem {

// Snapshot file format:
//
//   T N
//   t u v w        (one line per edge, t in [0,T), u,v in [0,N), w > 0)
//
// Lines starting with '#' are comments. The canonical form written by
// save_snapshots sorts edges by (t, u, v) and prints weights with 17
// significant digits.

enum class ParseErrorKind {
  kMalformedHeader,
  kMalformedLine,
  kNodeOutOfRange,
  kSnapshotOutOfRange,
  kNonPositiveWeight,
  kDuplicateEdge,
};

inline const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformedHeader: return "malformed header";
    case ParseErrorKind::kMalformedLine: return "malformed edge line";
    case ParseErrorKind::kNodeOutOfRange: return "node id out of range";
    case ParseErrorKind::kSnapshotOutOfRange: return "snapshot index out of range";
    case ParseErrorKind::kNonPositiveWeight: return "non-positive weight";
    case ParseErrorKind::kDuplicateEdge: return "duplicate edge";
  }
  return "parse error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
      : std::runtime_error("line " + std::to_string(line) + ": " + to_string(kind) +
                           (detail.empty() ? "" : ": " + detail)),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

inline SnapshotSequence parse_snapshots(std::string_view content) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  long num_snapshots = 0;
  long num_nodes = 0;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::map<std::pair<NodeId, NodeId>, std::size_t>> seen;

  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (text::is_skippable(line)) continue;
    const auto tok = text::split_ws(line);

    if (!have_header) {
      if (tok.size() != 2 || !text::parse_number(tok[0], num_snapshots) ||
          !text::parse_number(tok[1], num_nodes) || num_snapshots < 1 || num_nodes < 0) {
        throw ParseError(ParseErrorKind::kMalformedHeader, line_no,
                         "expected 'T N' with T >= 1, N >= 0");
      }
      have_header = true;
      edges.resize(static_cast<std::size_t>(num_snapshots));
      seen.resize(static_cast<std::size_t>(num_snapshots));
      continue;
    }

    long t = 0, u = 0, v = 0;
    double w = 0.0;
    if (tok.size() != 4 || !text::parse_number(tok[0], t) || !text::parse_number(tok[1], u) ||
        !text::parse_number(tok[2], v) || !text::parse_number(tok[3], w)) {
      throw ParseError(ParseErrorKind::kMalformedLine, line_no, "expected 't u v w'");
    }
    if (t < 0 || t >= num_snapshots) {
      throw ParseError(ParseErrorKind::kSnapshotOutOfRange, line_no,
                       "t=" + std::to_string(t) + " with T=" + std::to_string(num_snapshots));
    }
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
      throw ParseError(ParseErrorKind::kNodeOutOfRange, line_no,
                       "(" + std::to_string(u) + "," + std::to_string(v) +
                           ") with N=" + std::to_string(num_nodes));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ParseError(ParseErrorKind::kNonPositiveWeight, line_no, std::string(tok[3]));
    }
    const auto key = std::make_pair(static_cast<NodeId>(u), static_cast<NodeId>(v));
    auto [it, inserted] = seen[static_cast<std::size_t>(t)].emplace(key, line_no);
    if (!inserted) {
      throw ParseError(ParseErrorKind::kDuplicateEdge, line_no,
                       "(" + std::to_string(t) + "," + std::to_string(u) + "," +
                           std::to_string(v) + ") first seen on line " +
                           std::to_string(it->second));
    }
    edges[static_cast<std::size_t>(t)].push_back({key.first, key.second, w});
  }
  if (!have_header) throw ParseError(ParseErrorKind::kMalformedHeader, line_no, "missing header");

  std::vector<GraphSnapshot> snapshots;
  snapshots.reserve(edges.size());
  for (auto& e : edges) snapshots.emplace_back(static_cast<NodeId>(num_nodes), std::move(e));
  return SnapshotSequence(std::move(snapshots));
}

inline std::string format_snapshots(const SnapshotSequence& seq) {
  std::string out =
      std::to_string(seq.length()) + " " + std::to_string(seq.num_nodes()) + "\n";
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const std::string prefix = std::to_string(t) + " ";
    for (const Edge& e : seq[t].edges()) {
      out += prefix;
      out += std::to_string(e.u);
      out += ' ';
      out += std::to_string(e.v);
      out += ' ';
      out += text::format_double(e.w);
      out += '\n';
    }
  }
  return out;
}

inline SnapshotSequence load_snapshots(const std::string& path) {
  return parse_snapshots(text::read_file(path));
}

inline void save_snapshots(const SnapshotSequence& seq, const std::string& path) {
  text::write_file(path, format_snapshots(seq));
}

}  // namespace dyngem
