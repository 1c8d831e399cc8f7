#pragma once

// Shared pieces of the CSV/JSON report formats.

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ewlab::report {

inline constexpr int schema_version = 1;
inline constexpr std::string_view tool_name = "ewlab";
inline constexpr std::string_view tool_version = "1.0.0";

using Meta = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal that round-trips, '.' separator, no locale.
std::string number(double v);

// "# schema_version=1;tool=ewlab 1.0.0;key=value;..." followed by a newline.
void write_csv_meta(std::ostream& out, const Meta& meta);

} // namespace ewlab::report
