// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chemagent/text.hpp"

namespace test_util {

inline std::string data_path(const std::string &name) {
  return std::string(CHEMAGENT_DATA_DIR) + "/" + name;
}

inline std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (auto &row : chemagent::text::read_tsv(chemagent::text::read_file(data_path("molecules.txt"))))
    out.emplace_back(chemagent::text::trim(row[0]));
  return out;
}

inline std::vector<std::pair<std::string, std::string>> spellings() {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto &row : chemagent::text::read_tsv(chemagent::text::read_file(data_path("spellings.tsv"))))
    if (row.size() >= 2) out.emplace_back(row[0], row[1]);
  return out;
}

}  // namespace test_util
