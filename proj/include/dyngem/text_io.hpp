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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dyngem/types.hpp"

namespace dyngem::text {

// Shortest round-trip-safe rendering with 17 significant digits, independent
// of the global locale.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

// Comment lines start with '#'; blank lines carry nothing.
inline bool is_skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Text matrix: header "rows cols", then one row per line.
inline void append_matrix(std::string& out, const Matrix& m) {
  out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
}

// Reads whitespace-separated numeric tokens with line tracking.
class TokenReader {
 public:
  TokenReader(std::string content, std::string source)
      : content_(std::move(content)), source_(std::move(source)) {}

  template <typename T>
  T next(const char* what) {
    const std::string_view tok = next_token();
    if (tok.empty()) fail(std::string("unexpected end of input reading ") + what);
    T value{};
    if (!parse_number(tok, value)) {
      fail(std::string("bad ") + what + " '" + std::string(tok) + "'");
    }
    return value;
  }

  bool at_end() {
    skip_space();
    return pos_ >= content_.size();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  void skip_space() {
    while (pos_ < content_.size()) {
      const char c = content_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < content_.size() && content_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view next_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < content_.size() && content_[pos_] != ' ' && content_[pos_] != '\t' &&
           content_[pos_] != '\r' && content_[pos_] != '\n') {
      ++pos_;
    }
    return std::string_view(content_).substr(start, pos_ - start);
  }

  std::string content_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline Matrix read_matrix(TokenReader& in) {
  const auto rows = in.next<long>("row count");
  const auto cols = in.next<long>("column count");
  if (rows < 0 || cols < 0) in.fail("negative matrix shape");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = in.next<double>("matrix entry");
  }
  return m;
}

}  // namespace dyngem::text
