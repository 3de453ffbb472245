#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chefs {

/// Optional cell value. Absent means the source cell was empty or a missing token.
using Field = std::optional<std::string>;

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

/// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string canonicalize_text(std::string_view s);

/// Splits on a multi-character separator; keeps empty pieces.
std::vector<std::string_view> split(std::string_view s, std::string_view sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Empty, whitespace-only, "NA", "N/A" and "null" (any case) are all missing.
bool is_missing_token(std::string_view s) noexcept;

/// Applies missing-token normalization to a raw cell.
Field normalize_cell(std::string_view raw);

/// Strict base-10 integer parse of the whole (trimmed) string.
std::optional<long long> parse_integer(std::string_view s) noexcept;

/// Strict decimal parse of the whole (trimmed) string.
std::optional<double> parse_decimal(std::string_view s) noexcept;

/// Shortest text that reproduces the double exactly.
std::string format_double(double v);

}  // namespace chefs
