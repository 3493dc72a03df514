// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chemagent/descriptors.hpp"

namespace chemagent::toolbox {

enum class OutputKind { real2dp, yes_no, high_low, true_false };

std::string_view kind_name(OutputKind k);
bool is_quantitative(OutputKind k);

// Underlying value of a tool answer; monostate when the call failed.
using RawValue = std::variant<std::monostate, double, bool>;

struct ToolSpec {
  std::string name;
  std::string description;
  std::string label;  // short display name used by `describe`
  OutputKind kind = OutputKind::real2dp;
  std::function<RawValue(const molkit::Molecule &, const descriptors::Tables &)> compute;
};

struct ToolResult {
  std::string tool;
  std::string input;
  std::string text;
  RawValue raw;
  bool ok = false;
};

// Half-up rounding to two decimals, then fixed formatting. -0.00 prints as 0.00.
std::string format_2dp(double v);
std::string format_value(OutputKind k, const RawValue &v);

class ToolRegistry {
public:
  ToolRegistry(std::shared_ptr<const descriptors::Tables> tables, std::vector<ToolSpec> tools);

  const std::vector<ToolSpec> &tools() const { return tools_; }
  std::size_t size() const { return tools_.size(); }
  const ToolSpec *find(std::string_view name) const;
  const descriptors::Tables &tables() const { return *tables_; }

  // Never throws; failures come back as ok == false with the message in text.
  ToolResult invoke(std::string_view name, std::string_view input) const;

  std::string names_csv() const;

private:
  std::shared_ptr<const descriptors::Tables> tables_;
  std::vector<ToolSpec> tools_;
};

std::shared_ptr<const ToolRegistry> default_registry(
    std::shared_ptr<const descriptors::Tables> tables);
std::shared_ptr<const ToolRegistry> default_registry(const std::string &data_dir);

}  // namespace chemagent::toolbox
