#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "satrag/cellgroups.hpp"
#include "satrag/ingest.hpp"

namespace satrag {

// Documents plus their decomposed cell groups.
struct Corpus {
  std::vector<Document> documents;
  std::vector<CellGroup> cell_groups;

  const Document* find_document(std::string_view doc_id) const;
  const Table* find_table(std::string_view doc_id, std::string_view table_id) const;
  std::size_t table_count() const;
};

std::string passage_key(std::string_view doc_id, std::string_view passage_id);
std::string table_key(std::string_view doc_id, std::string_view table_id);
// "doc/table/row/col" -> "doc/table".
std::string table_key_of_cell(std::string_view cell_id);

// Annotates headers and decomposes every table. Throws MalformedInput on a
// duplicate doc_id.
Corpus build_corpus(std::vector<Document> documents,
                    std::size_t context_budget = kDefaultContextBudget);

// Markdown (.md, .markdown) and structured-grid (.json) files, sorted by name.
std::vector<std::filesystem::path> list_inputs(const std::filesystem::path& dir);
// doc_id defaults to the file stem.
Document read_input_file(const std::filesystem::path& path, ParseReport* report = nullptr);

// Layout: <dir>/documents/<doc_id>.json and <dir>/cellgroups.jsonl.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace satrag
