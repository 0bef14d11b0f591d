#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpred {

/// Shortest decimal representation that parses back to the same double.
/// Infinities are written as "inf" / "-inf". Never locale dependent.
std::string format_double(double v);

/// Appends format_double(v) to `out` without a temporary string.
void append_double(std::string& out, double v);

/// Strict parse of a full cell. Accepts "inf"/"-inf"; rejects NaN, empty
/// cells and trailing garbage.
std::optional<double> parse_double(std::string_view s);

std::optional<long long> parse_int(std::string_view s);

/// Splits one CSV line on ','. No quoting: every cell in our formats is numeric
/// or a bare identifier.
std::vector<std::string_view> split_csv(std::string_view line);

}  // namespace bpred
