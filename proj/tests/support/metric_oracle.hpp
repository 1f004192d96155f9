#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace satrag::testing {

// Reduced rational for comparing against library fractions.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
};
Ratio reduced(std::int64_t num, std::int64_t den);

// Reference metric definitions written straight from their formulas.
Ratio ref_hit(const std::vector<std::string>& ranked, const std::set<std::string>& gold, std::size_t k);
Ratio ref_recall(const std::vector<std::string>& ranked, const std::set<std::string>& gold, std::size_t k);
Ratio ref_precision(const std::vector<std::string>& ranked, const std::set<std::string>& gold, std::size_t k);

struct RefCell {
  Ratio hit, recall, precision;
};
RefCell ref_cell(const std::vector<std::vector<std::string>>& units, const std::set<std::string>& gold,
                 std::size_t k);

}  // namespace satrag::testing
