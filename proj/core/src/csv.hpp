#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace netweave::detail {

/// Quotes the field when it contains a comma, quote, or newline.
std::string csv_field(std::string_view value);

/// Shortest representation that round-trips; identical on every run.
std::string csv_number(double value);
std::string csv_number(const std::optional<double>& value);

}  // namespace netweave::detail
