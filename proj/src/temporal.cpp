#include "satrag/temporal.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <limits>
#include <regex>

#include "satrag/text.hpp"

namespace satrag {

namespace {

constexpr int kMinYear = 1800;
constexpr int kMaxYear = 2199;

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

bool plausible_year(int y) {
  return y >= kMinYear && y <= kMaxYear;
}

int month_from_name(const std::string& name) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  std::string n = text::to_lower(name);
  if (n == "sept") return 9;
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (n == kNames[i] || (n.size() == 3 && kNames[i].substr(0, 3) == n)) {
      return static_cast<int>(i) + 1;
    }
  }
  return 0;
}

TemporalValue make_year(int y) {
  TemporalValue v;
  v.kind = TemporalKind::Year;
  v.year = y;
  return v;
}

TemporalValue make_quarter(int y, int q) {
  TemporalValue v;
  v.kind = TemporalKind::Quarter;
  v.year = y;
  v.quarter = q;
  return v;
}

TemporalValue make_month(int y, int m) {
  TemporalValue v;
  v.kind = TemporalKind::Month;
  v.year = y;
  v.month = m;
  return v;
}

std::optional<TemporalValue> make_day(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  TemporalValue v;
  v.kind = TemporalKind::Day;
  v.year = y;
  v.month = m;
  v.day = d;
  return v;
}

TemporalValue make_interval(int first, int last) {
  TemporalValue v;
  v.kind = TemporalKind::Interval;
  v.year = first;
  v.end_year = last;
  return v;
}

int two_digit_year(int yy) {
  return 2000 + yy;
}

struct Patterns {
  static constexpr auto kFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;
  std::regex year{R"(^(\d{4})$)", kFlags};
  std::regex fiscal{R"(^(?:fy|fiscal(?:\s+year)?)\s*'?(\d{4}|\d{2})$)", kFlags};
  std::regex quarter_first{R"(^q([1-4])\s*,?\s*(?:fy\s*)?'?(\d{4})$)", kFlags};
  std::regex quarter_last{R"(^(?:fy\s*)?(\d{4})\s*[-/ ]?\s*q([1-4])$)", kFlags};
  std::regex quarter_bare{R"(^q([1-4])$)", kFlags};
  std::regex month_name_year{R"(^([a-z]{3,9})\.?\s*,?\s*(\d{4})$)", kFlags};
  std::regex month_day_year{R"(^([a-z]{3,9})\.?\s+(\d{1,2})(?:st|nd|rd|th)?\s*,?\s*(\d{4})$)", kFlags};
  std::regex day_month_year{R"(^(\d{1,2})\s+([a-z]{3,9})\.?\s*,?\s*(\d{4})$)", kFlags};
  std::regex iso_month{R"(^(\d{4})[-/](\d{1,2})$)", kFlags};
  std::regex iso_day{R"(^(\d{4})[-/](\d{1,2})[-/](\d{1,2})$)", kFlags};
  std::regex us_day{R"(^(\d{1,2})/(\d{1,2})/(\d{4})$)", kFlags};
  std::regex range{R"(^(\d{4})\s*(?:-|–|—|to|through|\.\.)\s*(\d{4})$)", kFlags};
  std::regex open_after{R"(^(?:since|after|from)\s+(\d{4})$)", kFlags};
  std::regex open_suffix{R"(^(\d{4})\s*(?:onwards?|and later|\+|\.\.)$)", kFlags};
};

const Patterns& patterns() {
  static const Patterns p;
  return p;
}

int to_int(const std::ssub_match& m) {
  return std::stoi(m.str());
}

}  // namespace

std::string TemporalValue::canonical() const {
  char buf[32];
  switch (kind) {
    case TemporalKind::NotTemporal:
      return {};
    case TemporalKind::Year:
      std::snprintf(buf, sizeof(buf), "%04d", year);
      return buf;
    case TemporalKind::Quarter:
      if (year == 0) {
        std::snprintf(buf, sizeof(buf), "Q%d", quarter);
      } else {
        std::snprintf(buf, sizeof(buf), "%04d-Q%d", year, quarter);
      }
      return buf;
    case TemporalKind::Month:
      std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
      return buf;
    case TemporalKind::Day:
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
      return buf;
    case TemporalKind::Interval:
      if (end_year == 0) {
        std::snprintf(buf, sizeof(buf), "%04d..", year);
      } else {
        std::snprintf(buf, sizeof(buf), "%04d..%04d", year, end_year);
      }
      return buf;
  }
  return {};
}

std::optional<TemporalValue> TemporalValue::parent() const {
  switch (kind) {
    case TemporalKind::Day:
      return make_month(year, month);
    case TemporalKind::Month:
      return make_year(year);
    case TemporalKind::Quarter:
      if (year == 0) return std::nullopt;
      return make_year(year);
    default:
      return std::nullopt;
  }
}

std::vector<TemporalValue> TemporalValue::chain() const {
  std::vector<TemporalValue> out;
  if (!is_temporal()) return out;
  out.push_back(*this);
  while (auto p = out.back().parent()) out.push_back(*p);
  return out;
}

std::optional<DayInterval> TemporalValue::interval() const {
  switch (kind) {
    case TemporalKind::NotTemporal:
      return std::nullopt;
    case TemporalKind::Year:
      return DayInterval{days_from_civil(year, 1, 1), days_from_civil(year, 12, 31)};
    case TemporalKind::Quarter: {
      if (year == 0) return std::nullopt;
      int first_month = (quarter - 1) * 3 + 1;
      int last_month = first_month + 2;
      return DayInterval{
          days_from_civil(year, static_cast<unsigned>(first_month), 1),
          days_from_civil(year, static_cast<unsigned>(last_month),
                          static_cast<unsigned>(days_in_month(year, last_month)))};
    }
    case TemporalKind::Month:
      return DayInterval{days_from_civil(year, static_cast<unsigned>(month), 1),
                         days_from_civil(year, static_cast<unsigned>(month),
                                         static_cast<unsigned>(days_in_month(year, month)))};
    case TemporalKind::Day: {
      auto d = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
      return DayInterval{d, d};
    }
    case TemporalKind::Interval:
      return DayInterval{days_from_civil(year, 1, 1),
                         end_year == 0 ? std::numeric_limits<std::int64_t>::max()
                                       : days_from_civil(end_year, 12, 31)};
  }
  return std::nullopt;
}

TemporalValue normalize_temporal(std::string_view raw) {
  const std::string s(text::collapse_whitespace(raw));
  if (s.empty() || s.size() > 40) return {};
  const auto& p = patterns();
  std::smatch m;

  if (std::regex_match(s, m, p.year)) {
    int y = to_int(m[1]);
    return plausible_year(y) ? make_year(y) : TemporalValue{};
  }
  if (std::regex_match(s, m, p.fiscal)) {
    int y = m[1].length() == 2 ? two_digit_year(to_int(m[1])) : to_int(m[1]);
    return plausible_year(y) ? make_year(y) : TemporalValue{};
  }
  if (std::regex_match(s, m, p.quarter_first)) {
    int y = m[2].length() == 2 ? two_digit_year(to_int(m[2])) : to_int(m[2]);
    return plausible_year(y) ? make_quarter(y, to_int(m[1])) : TemporalValue{};
  }
  if (std::regex_match(s, m, p.quarter_last)) {
    int y = to_int(m[1]);
    return plausible_year(y) ? make_quarter(y, to_int(m[2])) : TemporalValue{};
  }
  if (std::regex_match(s, m, p.quarter_bare)) {
    return make_quarter(0, to_int(m[1]));
  }
  if (std::regex_match(s, m, p.month_name_year)) {
    int month = month_from_name(m[1].str());
    int y = to_int(m[2]);
    if (month != 0 && plausible_year(y)) return make_month(y, month);
    return {};
  }
  if (std::regex_match(s, m, p.month_day_year)) {
    int month = month_from_name(m[1].str());
    int y = to_int(m[3]);
    if (month == 0 || !plausible_year(y)) return {};
    return make_day(y, month, to_int(m[2])).value_or(TemporalValue{});
  }
  if (std::regex_match(s, m, p.day_month_year)) {
    int month = month_from_name(m[2].str());
    int y = to_int(m[3]);
    if (month == 0 || !plausible_year(y)) return {};
    return make_day(y, month, to_int(m[1])).value_or(TemporalValue{});
  }
  if (std::regex_match(s, m, p.iso_month)) {
    int y = to_int(m[1]);
    int month = to_int(m[2]);
    if (plausible_year(y) && month >= 1 && month <= 12) return make_month(y, month);
    return {};
  }
  if (std::regex_match(s, m, p.iso_day)) {
    int y = to_int(m[1]);
    if (!plausible_year(y)) return {};
    return make_day(y, to_int(m[2]), to_int(m[3])).value_or(TemporalValue{});
  }
  if (std::regex_match(s, m, p.us_day)) {
    int y = to_int(m[3]);
    if (!plausible_year(y)) return {};
    return make_day(y, to_int(m[1]), to_int(m[2])).value_or(TemporalValue{});
  }
  if (std::regex_match(s, m, p.range)) {
    int first = to_int(m[1]);
    int last = to_int(m[2]);
    if (plausible_year(first) && plausible_year(last) && first < last) {
      return make_interval(first, last);
    }
    return {};
  }
  if (std::regex_match(s, m, p.open_after) || std::regex_match(s, m, p.open_suffix)) {
    int y = to_int(m[1]);
    return plausible_year(y) ? make_interval(y, 0) : TemporalValue{};
  }
  return {};
}

namespace {

struct WordSpan {
  std::size_t begin;
  std::size_t end;
};

// Whitespace-delimited words with surrounding punctuation trimmed.
std::vector<WordSpan> words_of(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  auto is_ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto is_trim = [](char c) {
    return c == ',' || c == '.' || c == '?' || c == '!' || c == ';' || c == ':' || c == '(' ||
           c == ')' || c == '"' || c == '[' || c == ']';
  };
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    std::size_t e = i;
    while (b < e && is_trim(text[b])) ++b;
    while (e > b && is_trim(text[e - 1])) --e;
    if (b < e) words.push_back({b, e});
  }
  return words;
}

std::optional<TemporalMatch> match_at(std::string_view text, const std::vector<WordSpan>& words,
                                      std::size_t start) {
  constexpr std::size_t kMaxWindow = 4;
  std::size_t max_len = std::min(kMaxWindow, words.size() - start);
  for (std::size_t len = max_len; len >= 1; --len) {
    std::string candidate;
    for (std::size_t w = start; w < start + len; ++w) {
      if (!candidate.empty()) candidate.push_back(' ');
      candidate.append(text.substr(words[w].begin, words[w].end - words[w].begin));
    }
    auto value = normalize_temporal(candidate);
    if (value.is_temporal()) {
      TemporalMatch m;
      m.begin = words[start].begin;
      m.end = words[start + len - 1].end;
      m.text = std::string(text.substr(m.begin, m.end - m.begin));
      m.value = value;
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<TemporalMatch> find_temporal(std::string_view text) {
  auto words = words_of(text);
  for (std::size_t start = 0; start < words.size(); ++start) {
    if (auto m = match_at(text, words, start)) return m;
  }
  return std::nullopt;
}

std::vector<TemporalMatch> find_all_temporal(std::string_view text) {
  std::vector<TemporalMatch> out;
  auto words = words_of(text);
  std::size_t start = 0;
  while (start < words.size()) {
    if (auto m = match_at(text, words, start)) {
      while (start < words.size() && words[start].begin < m->end) ++start;
      out.push_back(std::move(*m));
    } else {
      ++start;
    }
  }
  return out;
}

}  // namespace satrag
