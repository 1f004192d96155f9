#include "satrag/text.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace satrag::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

constexpr std::array<std::string_view, 6> kCurrencySymbols = {
    "$", "\xE2\x82\xAC" /* € */, "\xC2\xA3" /* £ */, "\xC2\xA5" /* ¥ */, "\xE2\x82\xB9" /* ₹ */,
    "\xC2\xA2" /* ¢ */};

// Strips everything parse_number ignores and reports the sign convention.
// Returns nullopt when the remainder is not a plain decimal literal.
std::optional<std::string> numeric_core(std::string_view raw) {
  std::string s(trim(raw));
  if (s.empty()) return std::nullopt;

  bool negative = false;
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    negative = true;
    s = std::string(trim(std::string_view(s).substr(1, s.size() - 2)));
  }
  for (auto sym : kCurrencySymbols) s = replace_all(std::move(s), sym, "");
  s = replace_all(std::move(s), "\xE2\x88\x92", "-");  // unicode minus
  std::string cleaned;
  cleaned.reserve(s.size());
  for (char c : s) {
    if (c == ',' || is_space(c)) continue;
    cleaned.push_back(c);
  }
  if (!cleaned.empty() && cleaned.back() == '%') cleaned.pop_back();
  if (cleaned.empty()) return std::nullopt;

  std::size_t i = 0;
  if (cleaned[0] == '-' || cleaned[0] == '+') {
    if (cleaned[0] == '-') negative = !negative;
    i = 1;
  }
  std::size_t digits = 0;
  std::size_t dots = 0;
  for (std::size_t j = i; j < cleaned.size(); ++j) {
    char c = cleaned[j];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++digits;
    } else if (c == '.') {
      ++dots;
    } else {
      return std::nullopt;
    }
  }
  if (digits == 0 || dots > 1) return std::nullopt;
  std::string out = negative ? "-" : "";
  out.append(cleaned, i, std::string::npos);
  return out;
}

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string canonical_label(std::string_view s) {
  return to_lower(collapse_whitespace(s));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    auto uc = static_cast<unsigned char>(c);
    if (is_word_byte(uc)) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_blank(std::string_view s) {
  return trim(s).empty();
}

std::string utf8_truncate(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t cut = max_bytes;
  // Back off continuation bytes (10xxxxxx).
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::optional<double> parse_number(std::string_view raw) {
  auto core = numeric_core(raw);
  if (!core) return std::nullopt;
  return std::stod(*core);
}

std::string normalize_value(std::string_view raw) {
  if (auto core = numeric_core(raw)) return *core;
  return collapse_whitespace(raw);
}

}  // namespace satrag::text
