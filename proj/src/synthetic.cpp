#include "satrag/synthetic.hpp"

#include <cstdio>
#include <set>

#include "satrag/cellgroups.hpp"
#include "satrag/corpus.hpp"
#include "satrag/error.hpp"
#include "satrag/random.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {

struct Company {
  const char* doc_id;
  const char* name;
  const char* sector;
};

constexpr Company kCompanies[] = {
    {"aldermont", "Aldermont Holdings", "diversified industrial"},
    {"brightwater", "Brightwater Energy", "regional utility"},
    {"calloway", "Calloway Foods", "packaged food"},
    {"dunmore", "Dunmore Logistics", "freight and warehousing"},
    {"everton", "Everton Pharma", "specialty pharmaceutical"},
};

constexpr const char* kIncomeRows[] = {"Revenue",           "Cost of sales",    "Operating income",
                                       "Net income",        "Capital expenditure", "Research spending"};
constexpr const char* kSegments[] = {"Retail", "Wholesale"};
constexpr const char* kSegmentLines[] = {"Sales", "Margin"};
constexpr const char* kQuarterlyRows[] = {"Revenue", "Orders"};
constexpr int kQuarterlyYears[] = {2019, 2020};

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform_below(rng_, n)); }

  // Distinct corpus-wide values in 100.0 .. 999.9, none of which reads as a year.
  std::string table_value() {
    while (true) {
      const auto v = 1000 + below(9000);
      if (!used_values_.insert(v).second) continue;
      return std::to_string(v / 10) + "." + std::to_string(v % 10);
    }
  }

  std::string employees() {
    while (true) {
      const auto v = 1200 + below(8600);
      if (!used_employees_.insert(v).second) continue;
      const auto rest = std::to_string(v % 1000);
      return std::to_string(v / 1000) + "," + std::string(3 - rest.size(), '0') + rest;
    }
  }

  std::string sites() {
    while (true) {
      const auto v = 11 + below(88);
      if (!used_sites_.insert(v).second) continue;
      return std::to_string(v);
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::size_t> used_values_;
  std::set<std::size_t> used_employees_;
  std::set<std::size_t> used_sites_;
};

std::vector<RawCell> text_row(std::size_t r, const std::vector<std::string>& contents) {
  std::vector<RawCell> row;
  for (std::size_t c = 0; c < contents.size(); ++c) row.push_back(RawCell{r, c, contents[c], false});
  return row;
}

std::string query_words(const std::string& attribute) {
  return text::to_lower(text::replace_all(attribute, " / ", " "));
}

void record(ToyCorpus& out, const Company& co, const std::string& table_id, std::size_t r, std::size_t c,
            const std::string& attribute, int year, int quarter, const std::string& value) {
  ToyCell cell;
  cell.cell_id = make_cell_id(co.doc_id, table_id, r, c);
  cell.doc_id = co.doc_id;
  cell.entity = co.name;
  cell.table_id = table_id;
  cell.attribute = attribute;
  cell.query_words = attribute.find(" / ") == std::string::npos ? attribute : query_words(attribute);
  cell.period = quarter == 0 ? std::to_string(year) : "Q" + std::to_string(quarter) + " " + std::to_string(year);
  cell.year = year;
  cell.quarter = quarter;
  cell.value = value;
  out.cells.push_back(std::move(cell));
}

Table income_table(ToyCorpus& out, const Company& co, Draws& draws) {
  Table t;
  t.table_id = "income";
  t.doc_id = co.doc_id;
  t.caption = "Consolidated income statement (in millions)";
  t.anchor = 1;
  t.marked_header_rows = 1;
  std::vector<std::string> header{""};
  for (int y = kToyFirstYear; y <= kToyLastYear; ++y) header.push_back(std::to_string(y));
  t.grid.push_back(text_row(0, header));
  std::size_t r = 1;
  for (const char* label : kIncomeRows) {
    std::vector<std::string> row{label};
    for (int y = kToyFirstYear; y <= kToyLastYear; ++y) {
      row.push_back(draws.table_value());
      record(out, co, t.table_id, r, row.size() - 1, label, y, 0, row.back());
    }
    t.grid.push_back(text_row(r, row));
    ++r;
  }
  return t;
}

Table segment_table(ToyCorpus& out, const Company& co, Draws& draws) {
  Table t;
  t.table_id = "segments";
  t.doc_id = co.doc_id;
  t.caption = "Segment results (in millions)";
  t.anchor = 6;
  t.marked_header_rows = 1;
  std::vector<std::string> header{"", ""};
  for (int y = kToyFirstYear; y <= kToyLastYear; ++y) header.push_back(std::to_string(y));
  t.grid.push_back(text_row(0, header));
  std::size_t r = 1;
  for (const char* segment : kSegments) {
    t.spans.push_back({r, 0, 2, 1});
    bool first = true;
    for (const char* line : kSegmentLines) {
      std::vector<std::string> row{first ? segment : "", line};
      const std::string attribute = std::string(segment) + " / " + line;
      for (int y = kToyFirstYear; y <= kToyLastYear; ++y) {
        row.push_back(draws.table_value());
        record(out, co, t.table_id, r, row.size() - 1, attribute, y, 0, row.back());
      }
      t.grid.push_back(text_row(r, row));
      first = false;
      ++r;
    }
  }
  return t;
}

Table quarterly_table(ToyCorpus& out, const Company& co, Draws& draws) {
  Table t;
  t.table_id = "quarterly";
  t.doc_id = co.doc_id;
  t.caption = "Quarterly results (in millions)";
  t.anchor = 7;
  t.marked_header_rows = 2;
  std::vector<std::string> years{""};
  std::vector<std::string> quarters{""};
  for (int y : kQuarterlyYears) {
    t.spans.push_back({0, years.size(), 1, 4});
    for (int q = 1; q <= 4; ++q) {
      years.push_back(q == 1 ? std::to_string(y) : "");
      quarters.push_back("Q" + std::to_string(q));
    }
  }
  t.grid.push_back(text_row(0, years));
  t.grid.push_back(text_row(1, quarters));
  std::size_t r = 2;
  for (const char* label : kQuarterlyRows) {
    std::vector<std::string> row{label};
    for (int y : kQuarterlyYears) {
      for (int q = 1; q <= 4; ++q) {
        row.push_back(draws.table_value());
        record(out, co, t.table_id, r, row.size() - 1, label, y, q, row.back());
      }
    }
    t.grid.push_back(text_row(r, row));
    ++r;
  }
  return t;
}

void add_passage(Document& doc, std::string text) {
  Passage p;
  p.doc_id = doc.doc_id;
  p.position = doc.passages.size();
  p.passage_id = "p" + std::to_string(p.position);
  p.text = std::move(text);
  doc.passages.push_back(std::move(p));
}

}  // namespace

ToyCorpus make_toy_corpus(std::uint64_t seed) {
  ToyCorpus out;
  Draws draws(seed);
  for (const auto& co : kCompanies) {
    Document doc;
    doc.doc_id = co.doc_id;
    doc.title = std::string(co.name) + " Annual Report " + std::to_string(kToyLastYear);
    doc.entity = co.name;
    const std::string name = co.name;

    // Only the workforce passages name a year, so a fact's period bridges to them.
    add_passage(doc, name + " operates as a " + co.sector + " business. This report presents consolidated " +
                         "results, segment performance and quarterly trading.");
    for (int y = kToyFirstYear; y <= kToyLastYear; ++y) {
      ToyPassageFact f{co.doc_id, "p" + std::to_string(doc.passages.size()), name, y, draws.employees(),
                       draws.sites()};
      add_passage(doc, "In " + std::to_string(y) + ", " + name + " had a workforce of " + f.employees +
                           " across " + f.sites + " sites.");
      out.passage_facts.push_back(std::move(f));
    }
    add_passage(doc, "Segment margins of " + name +
                         " reflect pricing discipline in the retail and wholesale channels.");
    add_passage(doc, "Quarterly trading of " + name +
                         " was seasonal, with orders concentrated in the second half of each year.");

    doc.tables.push_back(income_table(out, co, draws));
    doc.tables.push_back(segment_table(out, co, draws));
    doc.tables.push_back(quarterly_table(out, co, draws));
    for (auto& t : doc.tables) validate_table(t);
    out.documents.push_back(std::move(doc));
  }
  return out;
}

void write_toy_inputs(const ToyCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& doc : corpus.documents) {
    write_file(dir / (doc.doc_id + ".json"), document_to_json(doc).dump(2) + "\n");
  }
}

const ToyCell* find_toy_cell(const ToyCorpus& corpus, std::string_view doc_id, std::string_view attribute,
                             int year, int quarter) {
  for (const auto& c : corpus.cells) {
    if (c.doc_id == doc_id && c.attribute == attribute && c.year == year && c.quarter == quarter) return &c;
  }
  return nullptr;
}

namespace {

const ToyPassageFact* find_passage_fact(const ToyCorpus& corpus, std::string_view doc_id, int year) {
  for (const auto& f : corpus.passage_facts) {
    if (f.doc_id == doc_id && f.year == year) return &f;
  }
  return nullptr;
}

std::string qid(const char* kind, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%02zu", kind, n);
  return buf;
}

}  // namespace

std::vector<QaItem> make_ablation_benchmark(const ToyCorpus& corpus, std::uint64_t seed, std::size_t n_point,
                                            std::size_t n_comparison, std::size_t n_text) {
  std::vector<const ToyCell*> annual;
  for (const auto& c : corpus.cells) {
    if (c.quarter == 0) annual.push_back(&c);
  }
  if (annual.empty()) throw Error(ErrorCode::ConfigError, "toy corpus has no annual cells");
  Draws draws(seed);
  std::set<std::string> used;  // focal cells already asked about
  auto pick = [&](int min_year) {
    while (true) {
      const auto* c = annual[draws.below(annual.size())];
      if (c->year < min_year || used.count(c->cell_id) != 0) continue;
      used.insert(c->cell_id);
      return c;
    }
  };

  std::vector<QaItem> items;
  for (std::size_t i = 0; i < n_point; ++i) {
    const auto* c = pick(kToyFirstYear);
    QaItem q;
    q.query_id = qid("point", i + 1);
    q.question = "What was " + c->entity + "'s " + c->query_words + " in " + c->period + "?";
    q.gold_cell_ids = {c->cell_id};
    q.gold_values = {text::normalize_value(c->value)};
    q.gold_answer = c->entity + "'s " + c->attribute + " was " + c->value + " in " + c->period + ".";
    items.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < n_comparison; ++i) {
    const auto* c = pick(kToyFirstYear + 1);
    const auto* prior = find_toy_cell(corpus, c->doc_id, c->attribute, c->year - 1);
    QaItem q;
    q.query_id = qid("compare", i + 1);
    q.question = "How did " + c->entity + "'s " + c->query_words + " change in " + c->period +
                 " compared to " + prior->period + "?";
    q.gold_cell_ids = {c->cell_id, prior->cell_id};
    q.gold_values = {text::normalize_value(c->value), text::normalize_value(prior->value)};
    q.gold_answer = c->entity + "'s " + c->attribute + " was " + c->value + " in " + c->period + ". It was " +
                    prior->value + " in " + prior->period + ".";
    items.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < n_text; ++i) {
    const auto* c = pick(kToyFirstYear);
    const auto* f = find_passage_fact(corpus, c->doc_id, c->year);
    QaItem q;
    q.query_id = qid("text", i + 1);
    q.flag = 1;
    q.question = "What was " + c->entity + "'s " + c->query_words + " in " + c->period +
                 ", and how large were its workforce and site network that year?";
    q.gold_cell_ids = {c->cell_id};
    q.gold_passage_ids = {passage_key(f->doc_id, f->passage_id)};
    q.gold_values = {text::normalize_value(c->value), text::normalize_value(f->employees),
                     text::normalize_value(f->sites)};
    q.gold_answer = c->entity + "'s " + c->attribute + " was " + c->value + " in " + c->period + ". It had " +
                    f->employees + " employees across " + f->sites + " distribution sites.";
    items.push_back(std::move(q));
  }
  return items;
}

std::vector<SneFixture> make_sne_fixtures(const ToyCorpus& corpus) {
  std::vector<SneFixture> out;
  for (const auto& c : corpus.cells) {
    const ToyCell* prev = nullptr;
    const ToyCell* next = nullptr;
    if (c.quarter == 0) {
      prev = find_toy_cell(corpus, c.doc_id, c.attribute, c.year - 1);
      next = find_toy_cell(corpus, c.doc_id, c.attribute, c.year + 1);
    } else if (c.quarter > 1 && c.quarter < 4) {
      // Quarter 0 would name the annual cell, which is not a sibling.
      prev = find_toy_cell(corpus, c.doc_id, c.attribute, c.year, c.quarter - 1);
      next = find_toy_cell(corpus, c.doc_id, c.attribute, c.year, c.quarter + 1);
    }
    if (prev == nullptr || next == nullptr) continue;
    SneFixture f;
    f.query = {"How did " + c.entity + "'s " + c.query_words + " change in " + c.period + "?", 0};
    f.focal_cell = c.cell_id;
    f.neighbor_cells = {prev->cell_id, next->cell_id};
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Query> make_random_queries(const SATGraph& g, std::size_t n, std::uint64_t seed) {
  std::vector<std::string> subjects;
  std::vector<std::string> periods;
  std::vector<std::string> attributes;
  for (const auto& [id, s] : g.subjects) {
    if (!s.sentinel) subjects.push_back(s.label);
  }
  for (const auto& [id, t] : g.temporals) {
    if (t.sentinel) continue;
    periods.push_back(t.raw_label);
    periods.push_back(t.normalized.canonical());
  }
  for (const auto& [id, a] : g.attributes) attributes.push_back(a.label);
  if (subjects.empty()) subjects.push_back("Nobody");
  if (periods.empty()) periods.push_back("2019");
  if (attributes.empty()) attributes.push_back("value");

  Draws draws(seed);
  auto from = [&](const std::vector<std::string>& v) { return v[draws.below(v.size())]; };
  std::vector<Query> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string subject;
    std::string period;
    std::string attribute;
    const auto rs = draws.below(10);
    if (rs < 7) subject = from(subjects);
    else if (rs == 7) subject = "Zephyr Mining";
    const auto rt = draws.below(10);
    if (rt < 5) period = from(periods);
    else if (rt == 5) period = "FY " + std::to_string(kToyFirstYear + static_cast<int>(draws.below(5)));
    else if (rt == 6) period = "2031";
    const auto ra = draws.below(10);
    if (ra < 5) attribute = from(attributes);
    else if (ra < 7) attribute = query_words(from(attributes));
    else if (ra == 7) attribute = "widget throughput";

    std::string q;
    const auto intent = draws.below(3);
    if (intent == 1) q = "How did ";
    else if (intent == 2) q = "Give the breakdown of ";
    else q = "What was ";
    if (!subject.empty()) q += subject + "'s ";
    q += attribute.empty() ? "figures" : attribute;
    if (intent == 1) q += " change";
    if (!period.empty()) q += " in " + period;
    q += "?";
    if (subject.empty() && period.empty() && attribute.empty() && draws.below(2) == 0) q = "Tell me more.";
    out.push_back({q, static_cast<int>(draws.below(2))});
  }
  return out;
}

}  // namespace satrag
