#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "satrag/corpus.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/sat_graph.hpp"
#include "satrag/synthetic.hpp"

namespace satrag::testing {

// Toy corpus taken through decomposition, lifting and graph build.
struct ToyIndex {
  ToyCorpus toy;
  Corpus corpus;
  LiftReport lifted;
  SATGraph graph;
  std::vector<Chunk> chunks;
};

ToyIndex build_toy_index(std::uint64_t seed = 42);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::vector<std::string> cell_ids(const std::vector<EvidenceTuple>& tuples);

// Small hand-built table from rows of text; row 0 is marked as a header row.
Table grid_table(const std::string& doc_id, const std::string& table_id, const std::string& caption,
                 const std::vector<std::vector<std::string>>& rows, std::size_t anchor = 0);

}  // namespace satrag::testing
