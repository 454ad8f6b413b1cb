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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dyngem/text_io.hpp"
#include "dyngem/types.hpp"

namespace dyngem {

struct EmbeddingSnapshot {
  std::size_t t = 0;  // snapshot index the embedding belongs to
  Matrix src;         // n x d
  Matrix tgt;         // n x d; equal to src for symmetric methods
};

// Per-snapshot node embeddings produced by one method. Methods with a
// lookback window start at a later snapshot, so entries carry their index.
struct EmbeddingSeries {
  std::string method;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<EmbeddingSnapshot> steps;

  const EmbeddingSnapshot* find(std::size_t t) const {
    for (const auto& s : steps) {
      if (s.t == t) return &s;
    }
    return nullptr;
  }

  const EmbeddingSnapshot& at(std::size_t t) const {
    const auto* s = find(t);
    if (s == nullptr) {
      throw std::out_of_range("EmbeddingSeries: no embedding for snapshot " + std::to_string(t));
    }
    return *s;
  }

  std::vector<std::size_t> times() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) out.push_back(s.t);
    return out;
  }

  void push(std::size_t t, Matrix src, Matrix tgt) {
    if (!src.allFinite() || !tgt.allFinite()) {
      throw std::domain_error("EmbeddingSeries: non-finite embedding at snapshot " +
                              std::to_string(t));
    }
    if (src.rows() != tgt.rows() || src.cols() != tgt.cols()) {
      throw std::invalid_argument("EmbeddingSeries: source/target shapes differ");
    }
    if (!steps.empty() && (steps.front().src.rows() != src.rows() ||
                           steps.front().src.cols() != src.cols())) {
      throw std::invalid_argument("EmbeddingSeries: inconsistent embedding shape");
    }
    steps.push_back({t, std::move(src), std::move(tgt)});
  }
};

// Embedding file: "n d" header then n rows of d reals.
inline std::string format_embedding(const Matrix& y) {
  std::string out;
  text::append_matrix(out, y);
  return out;
}

inline Matrix parse_embedding(const std::string& content, const std::string& source) {
  text::TokenReader in(content, source);
  Matrix m = text::read_matrix(in);
  if (!in.at_end()) in.fail("trailing data after embedding matrix");
  return m;
}

inline std::string embedding_stem(std::size_t t) { return "emb_t" + std::to_string(t); }

// Writes <dir>/emb_t<t>.src and .tgt for every step plus <dir>/series.json
// (method tag and config); returns the paths.
inline std::vector<std::filesystem::path> save_embeddings(const EmbeddingSeries& series,
                                                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& s : series.steps) {
    const auto base = dir / embedding_stem(s.t);
    auto src = base;
    src += ".src";
    auto tgt = base;
    tgt += ".tgt";
    text::write_file(src.string(), format_embedding(s.src));
    text::write_file(tgt.string(), format_embedding(s.tgt));
    written.push_back(src);
    written.push_back(tgt);
  }
  const auto meta = dir / "series.json";
  const nlohmann::ordered_json j = {{"method", series.method}, {"config", series.config}};
  text::write_file(meta.string(), j.dump(2) + "\n");
  written.push_back(meta);
  return written;
}

// Reads every emb_t<t>.src/.tgt pair found in dir, ordered by t.
inline EmbeddingSeries load_embeddings(const std::filesystem::path& dir) {
  std::vector<std::size_t> ts;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("emb_t", 0) == 0 && entry.path().extension() == ".src") {
      const auto digits = name.substr(5, name.size() - 5 - 4);
      std::size_t t = 0;
      if (text::parse_number(digits, t)) ts.push_back(t);
    }
  }
  if (ts.empty()) throw std::runtime_error("no embeddings found in '" + dir.string() + "'");
  std::sort(ts.begin(), ts.end());
  EmbeddingSeries series;
  const auto meta = dir / "series.json";
  if (std::filesystem::exists(meta)) {
    const auto j = nlohmann::ordered_json::parse(text::read_file(meta.string()));
    series.method = j.value("method", "");
    if (j.contains("config")) series.config = j.at("config");
  }
  for (std::size_t t : ts) {
    const auto base = (dir / embedding_stem(t)).string();
    series.push(t, parse_embedding(text::read_file(base + ".src"), base + ".src"),
                parse_embedding(text::read_file(base + ".tgt"), base + ".tgt"));
  }
  return series;
}

}  // namespace dyngem
