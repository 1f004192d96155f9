#include "satrag/fusion.hpp"

#include <algorithm>
#include <regex>

#include <spdlog/spdlog.h>

#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

LinearizedFact linearize(const SATGraph& g, const EvidenceTuple& t) {
  LinearizedFact f;
  f.statement = g.subject(t.key.subject).label + "'s " + g.attribute(t.key.attribute).label + " is " +
                t.value + " at " + g.temporal(t.key.temporal).raw_label;
  f.source = t;
  return f;
}

std::vector<ScoredPassage> fetch_context(const LinearizedFact& fact, const Corpus& corpus,
                                         Embedder& embedder, std::size_t k) {
  const auto* doc = corpus.find_document(fact.source.doc_id);
  if (doc == nullptr || doc->passages.empty() || k == 0) return {};
  std::vector<std::string> texts{fact.statement};
  for (const auto& p : doc->passages) texts.push_back(p.text);
  const auto vectors = embedder.embed(texts);

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < doc->passages.size(); ++i) {
    ranked.emplace_back(quantize_score(cosine(vectors[0], vectors[i + 1])), i);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<ScoredPassage> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    const auto& p = doc->passages[ranked[i].second];
    out.push_back({passage_key(doc->doc_id, p.passage_id), doc->doc_id, p.text, ranked[i].first});
  }
  return out;
}

EvidencePackage build_package(const SATGraph& g, const Corpus& corpus, const std::vector<EvidenceTuple>& tuples,
                              const Query& q, const RetrievalConfig& rcfg, const FusionConfig& fcfg,
                              Embedder& embedder) {
  EvidencePackage pkg;
  pkg.query = q;
  for (const auto& t : tuples) pkg.facts.push_back(linearize(g, t));
  if (q.flag == 1 && rcfg.enable_fusion) {
    std::set<std::string> seen;
    for (const auto& f : pkg.facts) {
      for (auto& p : fetch_context(f, corpus, embedder, fcfg.passages_per_fact)) {
        if (seen.insert(p.key).second) pkg.passages.push_back(std::move(p));
      }
    }
  }
  return pkg;
}

EvidencePackage build_chunk_package(const std::vector<Chunk>& chunks,
                                    const std::vector<ScoredChunk>& retrieved, const Query& q) {
  EvidencePackage pkg;
  pkg.query = q;
  for (const auto& r : retrieved) {
    const auto& c = chunks.at(r.index);
    pkg.passages.push_back({c.chunk_id, c.doc_id, c.text, r.score});
  }
  return pkg;
}

namespace {

constexpr std::string_view kInstruction =
    "Answer the question using only the evidence below. Facts come from tables; passages come "
    "from the surrounding document text.";
constexpr std::string_view kCitation =
    "Cite every fact you rely on as [F#] and every passage as [P#], using the numbers above.";

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

std::string assemble_prompt(const EvidencePackage& pkg, std::size_t budget) {
  if (pkg.facts.empty() && pkg.passages.empty()) {
    throw Error(ErrorCode::EmptyEvidence, "no facts or passages to build a prompt from");
  }
  std::string head = std::string(kInstruction) + "\n\n";
  if (!pkg.facts.empty()) {
    head += "Facts:\n";
    for (std::size_t i = 0; i < pkg.facts.size(); ++i) {
      head += "[F" + std::to_string(i + 1) + "] " + one_line(pkg.facts[i].statement) + "\n";
    }
    head += "\n";
  }
  const std::string tail = "Question: " + one_line(pkg.query.text) + "\n\n" + std::string(kCitation) + "\n";

  std::vector<std::string> lines;
  for (std::size_t i = 0; i < pkg.passages.size(); ++i) {
    lines.push_back("[P" + std::to_string(i + 1) + "] " + one_line(pkg.passages[i].text));
  }
  auto total = [&] {
    std::size_t n = head.size() + tail.size();
    if (!lines.empty()) {
      n += std::string_view("Passages:\n").size() + 1;  // heading and closing blank line
      for (const auto& l : lines) n += l.size() + 1;
    }
    return n;
  };
  while (!lines.empty() && total() > budget) {
    const std::size_t over = total() - budget;
    auto& last = lines.back();
    const std::size_t prefix = last.find("] ") + 2;
    if (last.size() >= prefix + over + kTruncationMarker.size() + 1) {
      const std::size_t keep = last.size() - over - kTruncationMarker.size();
      last = text::utf8_truncate(last, keep) + std::string(kTruncationMarker);
    } else {
      lines.pop_back();
    }
  }

  std::string prompt = head;
  if (!lines.empty()) {
    prompt += "Passages:\n";
    for (const auto& l : lines) prompt += l + "\n";
    prompt += "\n";
  }
  prompt += tail;
  return prompt;
}

Answer generate_answer(const std::string& prompt, const EvidencePackage& pkg, CompletionProvider& llm) {
  Answer a;
  a.text = llm.complete(prompt);
  if (text::is_blank(a.text)) throw Error(ErrorCode::EmptyCompletion, "model returned no text");

  static const std::regex marker(R"(\[(F|P)(\d+)\])");
  for (auto it = std::sregex_iterator(a.text.begin(), a.text.end(), marker); it != std::sregex_iterator(); ++it) {
    const bool fact = (*it)[1].str() == "F";
    const auto digits = (*it)[2].str();
    const std::size_t n = digits.size() > 6 ? 0 : std::stoul(digits);
    const std::size_t limit = fact ? pkg.facts.size() : pkg.passages.size();
    if (n == 0 || n > limit) {
      a.diagnostics.push_back("dropped citation " + it->str() + ": only " + std::to_string(limit) +
                              (fact ? " facts" : " passages") + " supplied");
      spdlog::debug("{}", a.diagnostics.back());
      continue;
    }
    if (fact) {
      a.cited_cell_ids.insert(pkg.facts[n - 1].source.cell_id);
    } else {
      a.cited_passage_ids.insert(pkg.passages[n - 1].key);
    }
  }
  return a;
}

}  // namespace satrag
