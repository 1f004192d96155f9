#include <algorithm>
#include <cctype>

#include "satrag/error.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::string_view to_string(Intent intent) {
  switch (intent) {
    case Intent::PointLookup: return "point-lookup";
    case Intent::TemporalComparison: return "temporal-comparison";
    case Intent::SubjectBreakdown: return "subject-breakdown";
  }
  return "point-lookup";
}

namespace {

constexpr std::string_view kComparisonWords[] = {"growth", "change", "increase", "decrease",
                                                  "compared", "trend"};
constexpr std::string_view kBreakdownWords[] = {"breakdown", "total", "composition"};

// Inflected forms ("changes", "increased") count; short stems must match exactly.
bool keyword_hit(const std::string& token, std::string_view kw) {
  if (token == kw) return true;
  if (token.size() <= kw.size() || token.compare(0, kw.size(), kw) != 0) return false;
  const auto rest = std::string_view(token).substr(kw.size());
  return rest == "s" || rest == "d" || rest == "ed" || rest == "es";
}

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words = {
      "a", "an", "the", "of", "in", "on", "at", "for", "to", "by", "from", "with", "and", "or",
      "is", "was", "were", "are", "be", "been", "what", "when", "which", "who", "how", "did",
      "does", "do", "much", "many", "status", "value", "values", "exceed", "exceeded", "million",
      "billion", "thousand", "numbers", "number", "during", "year", "years", "period", "its",
      "their", "s", "than", "over", "as", "this", "that", "reported", "report", "between", "across",
      "versus", "vs", "about", "give", "show", "tell", "me", "more", "please", "amount", "figure",
      "growth", "change", "changes", "increase", "increased", "decrease", "decreased", "compared",
      "compare", "trend", "breakdown", "composition", "rate"};
  return words;
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
}

struct Hit {
  std::size_t pos = 0;
  std::size_t len = 0;
  std::string label;
};

// Longest whole-word occurrence of any label; earliest position breaks ties.
std::optional<Hit> longest_label(const std::string& haystack, const std::vector<std::string>& labels) {
  std::optional<Hit> best;
  for (const auto& label : labels) {
    if (label.empty()) continue;
    if (best && label.size() < best->len) continue;
    std::size_t from = 0;
    while (true) {
      auto pos = haystack.find(label, from);
      if (pos == std::string::npos) break;
      const bool left_ok = pos == 0 || !word_char(haystack[pos - 1]) || !word_char(label.front());
      const std::size_t end = pos + label.size();
      const bool right_ok = end == haystack.size() || !word_char(haystack[end]) || !word_char(label.back());
      if (left_ok && right_ok) {
        if (!best || label.size() > best->len || (label.size() == best->len && pos < best->pos)) {
          best = Hit{pos, label.size(), label};
        }
        break;
      }
      from = pos + 1;
    }
  }
  return best;
}

void blank_out(std::string& s, std::size_t pos, std::size_t len) {
  for (std::size_t i = pos; i < pos + len && i < s.size(); ++i) s[i] = ' ';
}

std::vector<std::string> content_words(const std::string& lowered) {
  std::vector<std::string> out;
  for (const auto& raw : text::split(lowered, ' ')) {
    std::string_view w = raw;
    while (!w.empty() && !word_char(w.front())) w.remove_prefix(1);
    while (!w.empty() && !word_char(w.back())) w.remove_suffix(1);
    if (w.size() >= 2 && w.substr(w.size() - 2) == "'s") w.remove_suffix(2);
    if (w.empty() || stop_words().count(std::string(w)) != 0) continue;
    if (text::parse_number(w)) continue;
    out.emplace_back(w);
  }
  return out;
}

}  // namespace

Intent detect_intent(std::string_view text) {
  const auto tokens = text::tokenize(text);
  for (const auto& t : tokens) {
    for (auto kw : kComparisonWords) {
      if (keyword_hit(t, kw)) return Intent::TemporalComparison;
    }
  }
  for (const auto& t : tokens) {
    for (auto kw : kBreakdownWords) {
      if (keyword_hit(t, kw)) return Intent::SubjectBreakdown;
    }
  }
  return Intent::PointLookup;
}

LexiconAnalyzer::LexiconAnalyzer(const SATGraph& g) {
  for (const auto& [id, n] : g.subjects) {
    if (n.sentinel) continue;
    subjects_.push_back(text::to_lower(text::collapse_whitespace(n.label)));
    display_.emplace(subjects_.back(), n.label);
  }
  for (const auto& [id, a] : g.attributes) {
    attributes_.push_back(text::to_lower(text::collapse_whitespace(a.label)));
    display_.emplace(attributes_.back(), a.label);
  }
  auto tidy = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  tidy(subjects_);
  tidy(attributes_);
}

QuerySlots LexiconAnalyzer::analyze(const Query& q) {
  QuerySlots slots;
  slots.intent = detect_intent(q.text);
  const auto collapsed = text::collapse_whitespace(q.text);
  std::string work = text::to_lower(collapsed);

  if (auto hit = longest_label(work, subjects_)) {
    slots.subject_hint = display_.at(hit->label);
    blank_out(work, hit->pos, hit->len);
  }
  if (auto m = find_temporal(work)) {
    slots.temporal_hint = collapsed.substr(m->begin, m->end - m->begin);
    blank_out(work, m->begin, m->end - m->begin);
  }
  if (auto hit = longest_label(work, attributes_)) {
    slots.attribute_hint = display_.at(hit->label);
  } else {
    // Recover the original casing of the leftover words.
    const auto words = content_words(work);
    if (!words.empty()) {
      std::vector<std::string> original;
      const auto lowered_query = text::to_lower(collapsed);
      for (const auto& w : words) {
        auto pos = lowered_query.find(w);
        original.push_back(pos == std::string::npos ? w : collapsed.substr(pos, w.size()));
      }
      slots.attribute_hint = text::join(original, " ");
    }
  }
  if (slots.empty()) throw Error(ErrorCode::NoSlots, "no subject, period or attribute in query");
  return slots;
}

}  // namespace satrag
