// Copyright 2026 The AGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

// Internal helpers for the JSON file formats.

#ifndef AGP_SRC_JSON_UTIL_HPP_
#define AGP_SRC_JSON_UTIL_HPP_

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "agp/errors.hpp"
#include "agp/matrix.hpp"
#include "json.hpp"

namespace agp::detail {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + ": expected array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& r = j[i];
    if (!r.is_array() || r.size() != cols)
      throw FormatError(std::string(what) + ": ragged row " + std::to_string(i));
    for (std::size_t k = 0; k < cols; ++k) {
      if (!r[k].is_number()) throw FormatError(std::string(what) + ": non-numeric entry");
      m(i, k) = r[k].get<double>();
    }
  }
  return m;
}

inline std::vector<std::uint8_t> bits_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + ": expected array");
  std::vector<std::uint8_t> bits;
  bits.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number_integer()) throw FormatError(std::string(what) + ": expected 0/1 integers");
    const auto x = v.get<long long>();
    if (x != 0 && x != 1) throw ValidationError(std::string(what) + ": entry not in {0,1}");
    bits.push_back(static_cast<std::uint8_t>(x));
  }
  return bits;
}

/// Parses one document, translating parse errors into FormatError.
inline json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

/// Calls fn(line, line_number) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    fn(line, line_no);
  }
}

/// Whole file as bytes. Throws FormatError when it cannot be opened.
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Overwrites `path` with `data`. Throws FormatError on I/O failure.
inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("short write to " + path);
}

}  // namespace agp::detail

#endif  // AGP_SRC_JSON_UTIL_HPP_
