#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace satrag {

enum class TemporalKind {
  NotTemporal,
  Year,
  Quarter,   // year == 0 for a bare "Q2"
  Month,
  Day,
  Interval,  // year .. end_year; end_year == 0 means open-ended
};

// Inclusive day range, counted in days since 1970-01-01.
struct DayInterval {
  std::int64_t first = 0;
  std::int64_t last = 0;

  bool contains(const DayInterval& other) const {
    return first <= other.first && other.last <= last;
  }
};

struct TemporalValue {
  TemporalKind kind = TemporalKind::NotTemporal;
  int year = 0;
  int quarter = 0;
  int month = 0;
  int day = 0;
  int end_year = 0;

  bool is_temporal() const { return kind != TemporalKind::NotTemporal; }

  // "2019", "2019-Q2", "Q2", "2019-03", "2019-03-31", "2017..2019", "2019..".
  std::string canonical() const;

  // Enclosing value one level up: day -> month -> year, quarter -> year.
  std::optional<TemporalValue> parent() const;

  // Self followed by every ancestor, finest first.
  std::vector<TemporalValue> chain() const;

  // Absent for a quarter without a year.
  std::optional<DayInterval> interval() const;

  bool operator==(const TemporalValue&) const = default;
};

// Pattern-based normalization. Recognizes years, "Qn YYYY"/"YYYY Qn", bare
// "Qn", month names with a year, ISO dates (YYYY-MM, YYYY-MM-DD), "Month D,
// YYYY", fiscal-year phrases ("FY 2019" -> 2019) and year ranges. Anything
// else yields kind NotTemporal. Idempotent on canonical().
TemporalValue normalize_temporal(std::string_view raw);

struct TemporalMatch {
  std::size_t begin = 0;  // byte offsets into the scanned text
  std::size_t end = 0;
  std::string text;
  TemporalValue value;
};

// Earliest temporal expression in free text (longest at that position).
std::optional<TemporalMatch> find_temporal(std::string_view text);

// Every non-overlapping temporal expression, left to right.
std::vector<TemporalMatch> find_all_temporal(std::string_view text);

}  // namespace satrag
