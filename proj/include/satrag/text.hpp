#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satrag::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Case-fold + internal whitespace collapse; the only canonicalization applied
// to attribute and subject labels.
std::string canonical_label(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

// Lower-cased maximal runs of ASCII alphanumerics (bytes >= 0x80 count as
// alphanumeric so UTF-8 words stay whole).
std::vector<std::string> tokenize(std::string_view s);

bool is_blank(std::string_view s);

// Cuts at a UTF-8 code point boundary so the result is at most max_bytes long.
std::string utf8_truncate(std::string_view s, std::size_t max_bytes);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Numeric reading used by header detection and value matching: currency
// symbols, thousands separators, '%' and surrounding whitespace are stripped;
// "(5.2)" reads as -5.2.
std::optional<double> parse_number(std::string_view raw);

// Canonical textual form of a value: numeric values lose currency symbols,
// separators and trailing '%', and parentheses become a leading '-'.
// Non-numeric values are trimmed and whitespace-collapsed.
std::string normalize_value(std::string_view raw);

}  // namespace satrag::text
