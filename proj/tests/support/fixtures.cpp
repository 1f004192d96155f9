#include "fixtures.hpp"

#include <atomic>
#include <random>

#include <unistd.h>

namespace satrag::testing {

ToyIndex build_toy_index(std::uint64_t seed) {
  ToyIndex idx;
  idx.toy = make_toy_corpus(seed);
  idx.corpus = build_corpus(idx.toy.documents);
  DefaultSubjectExtractor subjects;
  idx.lifted = lift_all(idx.corpus.cell_groups, subjects);
  idx.graph = build_graph(idx.lifted.facts);
  idx.graph.corpus_hash = corpus_hash(idx.corpus.cell_groups);
  idx.chunks = build_chunks(idx.corpus);
  return idx;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("satrag-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<std::string> cell_ids(const std::vector<EvidenceTuple>& tuples) {
  std::vector<std::string> out;
  for (const auto& t : tuples) out.push_back(t.cell_id);
  return out;
}

Table grid_table(const std::string& doc_id, const std::string& table_id, const std::string& caption,
                 const std::vector<std::vector<std::string>>& rows, std::size_t anchor) {
  Table t;
  t.doc_id = doc_id;
  t.table_id = table_id;
  t.caption = caption;
  t.anchor = anchor;
  t.marked_header_rows = rows.empty() ? 0 : 1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<RawCell> row;
    for (std::size_t c = 0; c < rows[r].size(); ++c) row.push_back(RawCell{r, c, rows[r][c], false});
    t.grid.push_back(std::move(row));
  }
  return t;
}

}  // namespace satrag::testing
