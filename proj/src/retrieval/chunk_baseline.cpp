#include <algorithm>
#include <map>

#include "satrag/retrieval.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::vector<Chunk> build_chunks(const Corpus& corpus) {
  std::map<std::string, std::vector<std::string>> cells_by_row;
  for (const auto& g : corpus.cell_groups) {
    cells_by_row[table_key(g.doc_meta.doc_id, g.table_id) + "/r" + std::to_string(g.coordinate.row)]
        .push_back(g.cell_id);
  }

  std::vector<Chunk> chunks;
  for (const auto& doc : corpus.documents) {
    for (const auto& p : doc.passages) {
      Chunk c;
      c.chunk_id = passage_key(doc.doc_id, p.passage_id);
      c.doc_id = doc.doc_id;
      c.passage_id = p.passage_id;
      c.text = p.text;
      chunks.push_back(std::move(c));
    }
    for (const auto& t : doc.tables) {
      for (std::size_t r = 0; r < t.rows(); ++r) {
        std::vector<std::string> cells;
        for (std::size_t col = 0; col < t.cols(); ++col) {
          const auto& content = t.resolved(r, col);
          if (!text::is_blank(content)) cells.push_back(content);
        }
        if (cells.empty()) continue;
        Chunk c;
        c.chunk_id = table_key(doc.doc_id, t.table_id) + "/r" + std::to_string(r);
        c.doc_id = doc.doc_id;
        c.table_id = t.table_id;
        c.text = (t.caption.empty() ? std::string() : t.caption + ": ") + text::join(cells, " | ");
        if (auto it = cells_by_row.find(c.chunk_id); it != cells_by_row.end()) c.cell_ids = it->second;
        chunks.push_back(std::move(c));
      }
    }
  }
  return chunks;
}

std::vector<ScoredChunk> baseline_chunk_retrieve(const std::vector<Chunk>& chunks, const Query& q,
                                                 Embedder& embedder, std::size_t k) {
  if (chunks.empty() || k == 0) return {};
  std::vector<std::string> texts;
  texts.reserve(chunks.size() + 1);
  texts.push_back(q.text);
  for (const auto& c : chunks) texts.push_back(c.text);
  const auto vectors = embedder.embed(texts);

  std::vector<ScoredChunk> scored;
  scored.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    scored.push_back({i, quantize_score(cosine(vectors[0], vectors[i + 1]))});
  }
  std::sort(scored.begin(), scored.end(), [&](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    return chunks[a.index].chunk_id < chunks[b.index].chunk_id;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace satrag
