#include <algorithm>
#include <regex>

#include "satrag/error.hpp"
#include "satrag/eval.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {

void require(const std::set<std::string>& gold, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::ConfigError, "cutoff k must be at least 1");
  if (gold.empty()) throw Error(ErrorCode::EmptyGold, "no gold evidence for this query");
}

std::int64_t as_i64(std::size_t n) { return static_cast<std::int64_t>(n); }

}  // namespace

Fraction hit_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold, std::size_t k) {
  require(gold, k);
  for (std::size_t i = 0; i < retrieved.size() && i < k; ++i) {
    if (gold.count(retrieved[i]) != 0) return {1, 1};
  }
  return {0, 1};
}

Fraction recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                     std::size_t k) {
  require(gold, k);
  std::set<std::string> found;
  for (std::size_t i = 0; i < retrieved.size() && i < k; ++i) {
    if (gold.count(retrieved[i]) != 0) found.insert(retrieved[i]);
  }
  return {as_i64(found.size()), as_i64(gold.size())};
}

Fraction precision_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                        std::size_t k) {
  if (k == 0) throw Error(ErrorCode::ConfigError, "cutoff k must be at least 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < retrieved.size() && i < k; ++i) {
    if (gold.count(retrieved[i]) != 0) ++hits;
  }
  return {as_i64(hits), as_i64(k)};
}

CellMetrics cell_metrics(const std::vector<std::vector<std::string>>& retrieved_units,
                         const std::set<std::string>& gold_cells, std::size_t k) {
  require(gold_cells, k);
  std::set<std::string> attributed;
  for (std::size_t i = 0; i < retrieved_units.size() && i < k; ++i) {
    attributed.insert(retrieved_units[i].begin(), retrieved_units[i].end());
  }
  std::size_t relevant = 0;
  for (const auto& c : attributed) {
    if (gold_cells.count(c) != 0) ++relevant;
  }
  CellMetrics m;
  m.hit = {relevant > 0 ? 1 : 0, 1};
  m.recall = {as_i64(relevant), as_i64(gold_cells.size())};
  m.precision = {as_i64(relevant), as_i64(std::max(k, attributed.size()))};
  return m;
}

namespace {

// Whitespace-separated answer words with surrounding punctuation removed.
std::vector<std::string> numeric_candidates(std::string_view answer) {
  std::vector<std::string> out;
  std::string spaced(answer);
  for (char& c : spaced) {
    if (c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  for (const auto& raw : text::split(spaced, ' ')) {
    std::string_view w = raw;
    auto strip_back = [&] {
      while (!w.empty() && std::string_view(".,;:!?\"'").find(w.back()) != std::string_view::npos) {
        w.remove_suffix(1);
      }
    };
    strip_back();
    while (!w.empty() && std::string_view("\"'[").find(w.front()) != std::string_view::npos) w.remove_prefix(1);
    if (!w.empty() && w.back() == ']') w.remove_suffix(1);
    strip_back();
    const bool open = !w.empty() && w.front() == '(';
    const bool close = !w.empty() && w.back() == ')';
    if (open && !close) w.remove_prefix(1);
    if (close && !open) w.remove_suffix(1);
    if (!w.empty()) out.emplace_back(w);
  }
  return out;
}

}  // namespace

Fraction exact_value_recall(std::string_view answer, const std::vector<std::string>& gold_values) {
  if (gold_values.empty()) throw Error(ErrorCode::EmptyGold, "no gold values for this query");
  std::vector<double> numbers;
  for (const auto& w : numeric_candidates(answer)) {
    if (auto n = text::parse_number(w)) numbers.push_back(*n);
  }
  const auto lowered = text::to_lower(text::collapse_whitespace(answer));
  std::size_t matched = 0;
  for (const auto& g : gold_values) {
    if (auto n = text::parse_number(g)) {
      if (std::find(numbers.begin(), numbers.end(), *n) != numbers.end()) ++matched;
    } else {
      const auto needle = text::to_lower(text::collapse_whitespace(g));
      if (!needle.empty() && lowered.find(needle) != std::string::npos) ++matched;
    }
  }
  return {as_i64(matched), as_i64(gold_values.size())};
}

std::vector<std::string> split_claims(std::string_view input) {
  static const std::regex marker(R"(\[(?:F|P)\d+\])");
  std::string cleaned = std::regex_replace(std::string(input), marker, "");
  std::vector<std::string> claims;
  for (const auto& line : text::split(cleaned, '\n')) {
    auto l = text::trim(line);
    if (l == "ECHO:") continue;
    if (l.substr(0, 5) == "ECHO:") l = text::trim(l.substr(5));
    std::string current;
    for (std::size_t i = 0; i < l.size(); ++i) {
      current.push_back(l[i]);
      const bool terminal = l[i] == '.' || l[i] == '!' || l[i] == '?';
      if (terminal && (i + 1 == l.size() || l[i + 1] == ' ')) {
        if (!text::is_blank(current)) claims.push_back(text::collapse_whitespace(current));
        current.clear();
      }
    }
    if (!text::is_blank(current)) claims.push_back(text::collapse_whitespace(current));
  }
  return claims;
}

ClaimScores claim_alignment(std::string_view answer, std::string_view reference, Embedder& embedder,
                            double theta) {
  const auto a = split_claims(answer);
  const auto r = split_claims(reference);
  if (a.empty() || r.empty()) return {{0, std::max<std::int64_t>(1, as_i64(a.size()))},
                                      {0, std::max<std::int64_t>(1, as_i64(r.size()))}};
  std::vector<std::string> texts = a;
  texts.insert(texts.end(), r.begin(), r.end());
  const auto v = embedder.embed(texts);
  auto matched = [&](std::size_t from, std::size_t n, std::size_t other, std::size_t m) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = 0;
      for (std::size_t j = 0; j < m; ++j) best = std::max(best, cosine(v[from + i], v[other + j]));
      if (best + 1e-12 >= theta) ++count;
    }
    return count;
  };
  return {{as_i64(matched(0, a.size(), a.size(), r.size())), as_i64(a.size())},
          {as_i64(matched(a.size(), r.size(), 0, a.size())), as_i64(r.size())}};
}

}  // namespace satrag
