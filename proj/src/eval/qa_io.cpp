#include "satrag/corpus.hpp"
#include "satrag/error.hpp"
#include "satrag/eval.hpp"
#include "satrag/text.hpp"

namespace satrag {

nlohmann::json qa_item_to_json(const QaItem& item) {
  return {{"query_id", item.query_id},
          {"question", item.question},
          {"flag", item.flag},
          {"gold_cell_ids", item.gold_cell_ids},
          {"gold_passage_ids", item.gold_passage_ids},
          {"gold_answer", item.gold_answer},
          {"gold_values", item.gold_values}};
}

QaItem qa_item_from_json(const nlohmann::json& j) {
  try {
    QaItem item;
    item.query_id = j.at("query_id").get<std::string>();
    item.question = j.at("question").get<std::string>();
    item.flag = j.value("flag", 0);
    if (item.flag != 0 && item.flag != 1) {
      throw Error(ErrorCode::MalformedInput, "flag must be 0 or 1 in " + item.query_id);
    }
    item.gold_cell_ids = j.value("gold_cell_ids", std::vector<std::string>{});
    item.gold_passage_ids = j.value("gold_passage_ids", std::vector<std::string>{});
    item.gold_answer = j.value("gold_answer", "");
    item.gold_values = j.value("gold_values", std::vector<std::string>{});
    if (text::is_blank(item.question)) {
      throw Error(ErrorCode::MalformedInput, "empty question in " + item.query_id);
    }
    return item;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, std::string("bad QA record: ") + e.what());
  }
}

std::string qa_items_to_jsonl(const std::vector<QaItem>& items) {
  std::string out;
  for (const auto& i : items) out += qa_item_to_json(i).dump() + "\n";
  return out;
}

std::vector<QaItem> qa_items_from_jsonl(std::string_view jsonl) {
  std::vector<QaItem> items;
  std::size_t line_no = 0;
  for (const auto& line : text::split(jsonl, '\n')) {
    ++line_no;
    if (text::is_blank(line)) continue;
    try {
      items.push_back(qa_item_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedInput, "QA line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

std::vector<QaItem> load_qa_file(const std::filesystem::path& path) {
  return qa_items_from_jsonl(read_file(path));
}

}  // namespace satrag
