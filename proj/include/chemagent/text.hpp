// SPDX-License-Identifier: Apache-2.0
// Small string helpers shared by the table loaders.
#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemagent::text {

inline std::string_view trim(std::string_view s) {
  const char *ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? s.npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// Tab-separated rows; blank lines and lines starting with '#' are skipped.
inline std::vector<std::vector<std::string>> read_tsv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto p = content.find('\n', start);
    auto line = content.substr(start, p == std::string_view::npos ? content.npos : p - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && trim(line).front() != '#') rows.push_back(split(line, '\t'));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return rows;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double to_double(std::string_view s) {
  std::string tmp(trim(s));
  char *end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw std::runtime_error("bad number '" + tmp + "'");
  return v;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace chemagent::text
