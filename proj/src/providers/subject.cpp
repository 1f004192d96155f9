#include <spdlog/spdlog.h>

#include "satrag/error.hpp"
#include "satrag/providers.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::vector<std::string> DefaultSubjectExtractor::extract(const DocumentMetadata& meta,
                                                          std::string_view) {
  if (text::is_blank(meta.entity)) return {};
  return {std::string(text::trim(meta.entity))};
}

std::vector<std::string> parse_subject_path(std::string_view answer) {
  std::string_view t = text::trim(answer);
  if (t.empty() || t.find('\n') != std::string_view::npos) {
    throw Error(ErrorCode::UnparseableSubject, "expected a single line of the form 'A > B'");
  }
  std::vector<std::string> path;
  for (const auto& part : text::split(t, '>')) {
    auto label = text::trim(part);
    if (label.empty()) throw Error(ErrorCode::UnparseableSubject, "empty subject level");
    path.emplace_back(label);
  }
  // Prose answers split into long "levels"; a subject label is a short name.
  for (const auto& label : path) {
    if (text::tokenize(label).size() > 8 || label.back() == '.') {
      throw Error(ErrorCode::UnparseableSubject, "subject level looks like prose: " + label);
    }
  }
  return path;
}

std::vector<std::string> LlmSubjectExtractor::extract(const DocumentMetadata& meta,
                                                      std::string_view context) {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(meta.doc_id);
    if (it != cache_.end()) return it->second;
  }
  std::string prompt =
      "Name the subject described by this document as a hierarchy from the most general "
      "to the most specific level, on one line, levels separated by ' > ' (for example "
      "'Hardware > Laptop'). Output only that line.\n\nEntity: " +
      meta.entity + "\nTitle: " + meta.title + "\nContext: " + std::string(context) + "\n";
  std::vector<std::string> path;
  try {
    path = parse_subject_path(llm_.complete(prompt));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparseableSubject) throw;
    spdlog::warn("subject extraction for '{}' unparseable, using default: {}", meta.doc_id, e.what());
    path = DefaultSubjectExtractor{}.extract(meta, context);
  }
  std::lock_guard lock(mutex_);
  cache_.emplace(meta.doc_id, path);
  return path;
}

}  // namespace satrag
