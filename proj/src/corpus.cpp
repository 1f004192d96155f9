#include "satrag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

const Document* Corpus::find_document(std::string_view doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

const Table* Corpus::find_table(std::string_view doc_id, std::string_view table_id) const {
  const auto* doc = find_document(doc_id);
  if (doc == nullptr) return nullptr;
  for (const auto& t : doc->tables) {
    if (t.table_id == table_id) return &t;
  }
  return nullptr;
}

std::size_t Corpus::table_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.tables.size();
  return n;
}

std::string passage_key(std::string_view doc_id, std::string_view passage_id) {
  return std::string(doc_id) + "/" + std::string(passage_id);
}

std::string table_key(std::string_view doc_id, std::string_view table_id) {
  return std::string(doc_id) + "/" + std::string(table_id);
}

std::string table_key_of_cell(std::string_view cell_id) {
  auto last = cell_id.rfind('/');
  if (last == std::string_view::npos || last == 0) return std::string(cell_id);
  auto second = cell_id.rfind('/', last - 1);
  if (second == std::string_view::npos) return std::string(cell_id);
  return std::string(cell_id.substr(0, second));
}

Corpus build_corpus(std::vector<Document> documents, std::size_t context_budget) {
  Corpus corpus;
  std::set<std::string> ids;
  for (auto& doc : documents) {
    if (!ids.insert(doc.doc_id).second) {
      throw Error(ErrorCode::MalformedInput, "duplicate document id '" + doc.doc_id + "'");
    }
    auto groups = decompose_document(doc, context_budget);
    corpus.cell_groups.insert(corpus.cell_groups.end(), std::make_move_iterator(groups.begin()),
                              std::make_move_iterator(groups.end()));
  }
  corpus.documents = std::move(documents);
  return corpus;
}

std::vector<std::filesystem::path> list_inputs(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoFailure, "input directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = text::to_lower(entry.path().extension().string());
    if (ext == ".md" || ext == ".markdown" || ext == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

Document read_input_file(const std::filesystem::path& path, ParseReport* report) {
  const auto raw = read_file(path);
  const auto ext = text::to_lower(path.extension().string());
  const auto format = ext == ".json" ? InputFormat::StructuredGrid : InputFormat::Markdown;
  return parse_document(raw, format, path.stem().string(), report);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  for (const auto& doc : corpus.documents) {
    write_file(dir / "documents" / (doc.doc_id + ".json"), document_to_json(doc).dump(1) + "\n");
  }
  write_file(dir / "cellgroups.jsonl", cell_groups_to_jsonl(corpus.cell_groups));
}

Corpus load_corpus(const std::filesystem::path& dir) {
  const auto docs_dir = dir / "documents";
  std::error_code ec;
  if (!std::filesystem::is_directory(docs_dir, ec)) {
    throw Error(ErrorCode::IoFailure, "no ingested corpus at " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(docs_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  for (const auto& f : files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(f));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedInput, f.string() + ": " + e.what());
    }
    auto doc = document_from_json(j);
    // Header flags are not persisted; recompute them.
    for (auto& t : doc.tables) annotate_headers(t);
    corpus.documents.push_back(std::move(doc));
  }
  corpus.cell_groups = cell_groups_from_jsonl(read_file(dir / "cellgroups.jsonl"));
  return corpus;
}

}  // namespace satrag
