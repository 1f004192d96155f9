#include "commands.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "satrag/config.hpp"
#include "satrag/corpus.hpp"
#include "satrag/dataset_gen.hpp"
#include "satrag/error.hpp"
#include "satrag/eval.hpp"
#include "satrag/fusion.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/sat_graph.hpp"

namespace satrag::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ProviderFailure:
    case ErrorCode::EmptyCompletion:
    case ErrorCode::InputTooLong:
      return kExitProvider;
    default:
      return kExitInput;
  }
}

// Command-line values that override the config file when given.
struct Overrides {
  std::string config_path;
  bool verbose = false;
  std::optional<std::uint64_t> seed;
  std::string corpus_dir;
  std::string index_path;
  std::optional<std::size_t> top_k;
  std::optional<double> threshold;
  std::optional<std::size_t> radius;
  bool no_sne = false;
  bool no_fusion = false;
  std::string mode;
  std::string completion;
};

void add_retrieval_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--top-k", o.top_k, "Evidence tuples (or chunks) to keep");
  cmd->add_option("--threshold", o.threshold, "Similarity needed to resolve a hint to a node");
  cmd->add_option("--radius", o.radius, "Neighbor expansion radius");
  cmd->add_flag("--no-sne", o.no_sne, "Disable structural neighbor expansion");
  cmd->add_flag("--no-fusion", o.no_fusion, "Do not fetch passages for f=1 queries");
  cmd->add_option("--mode", o.mode, "sat-graph or chunk-baseline");
  cmd->add_option("--completion", o.completion,
                  "Completion provider kind: none, echo, evidence-echo, scripted-accept, scripted-reject, http");
}

AppConfig effective_config(const Overrides& o) {
  AppConfig cfg = o.config_path.empty() ? AppConfig{} : load_config(o.config_path);
  if (o.verbose) cfg.verbose = true;
  if (o.seed) cfg.gen.seed = *o.seed;
  if (!o.corpus_dir.empty()) cfg.corpus_dir = o.corpus_dir;
  if (!o.index_path.empty()) cfg.index_path = o.index_path;
  if (o.top_k) cfg.retrieval.top_k = *o.top_k;
  if (o.threshold) cfg.retrieval.similarity_threshold = *o.threshold;
  if (o.radius) cfg.retrieval.expansion_radius = *o.radius;
  if (o.no_sne) cfg.retrieval.enable_sne = false;
  if (o.no_fusion) cfg.retrieval.enable_fusion = false;
  if (!o.mode.empty()) cfg.retrieval.mode = parse_retrieval_mode(o.mode);
  if (!o.completion.empty()) cfg.completion.kind = o.completion;
  validate_config(cfg);
  spdlog::set_level(cfg.verbose ? spdlog::level::debug : spdlog::level::warn);
  if (cfg.verbose) std::cerr << "effective config:\n" << config_to_json(cfg).dump(2) << "\n";
  return cfg;
}

EvalConfig eval_config(const AppConfig& cfg) {
  EvalConfig e;
  e.retrieval = cfg.retrieval;
  e.fusion = cfg.fusion;
  e.cutoffs_f0 = cfg.cutoffs_f0;
  e.cutoffs_f1 = cfg.cutoffs_f1;
  e.claim_threshold = cfg.claim_threshold;
  return e;
}

int cmd_ingest(const Overrides& o, const std::string& input_dir, bool enrich) {
  const auto cfg = effective_config(o);
  const auto inputs = list_inputs(input_dir);
  if (inputs.empty()) {
    std::cerr << "error: no inputs in " << input_dir << "\n";
    return kExitInput;
  }
  std::vector<Document> docs;
  std::size_t failures = 0;
  for (const auto& path : inputs) {
    try {
      ParseReport report;
      docs.push_back(read_input_file(path, &report));
      for (const auto& p : report.padded_rows) {
        std::cerr << "warning: " << path.string() << ": table " << p.table_index << " row " << p.row
                  << " padded with " << p.added_cells << " empty cells\n";
      }
    } catch (const Error& e) {
      ++failures;
      std::cerr << "error: " << path.string() << ": " << to_string(e.code()) << ": " << e.what() << "\n";
    }
  }
  Corpus corpus = build_corpus(std::move(docs), cfg.context_budget);
  if (enrich) {
    auto providers = make_providers(cfg);
    if (providers.completion() == nullptr) throw Error(ErrorCode::ConfigError, "--enrich needs a completion provider");
    std::cout << "entities filled: " << enrich_corpus_entities(corpus, *providers.completion()) << "\n";
  }
  save_corpus(corpus, cfg.corpus_dir);
  for (const auto& doc : corpus.documents) {
    std::size_t cells = 0;
    for (const auto& cg : corpus.cell_groups) {
      if (cg.doc_meta.doc_id == doc.doc_id) ++cells;
    }
    std::cout << doc.doc_id << ": " << doc.tables.size() << " tables, " << cells << " cells, "
              << doc.passages.size() << " passages\n";
  }
  std::cout << "ingested " << corpus.documents.size() << " of " << inputs.size() << " documents ("
            << corpus.table_count() << " tables, " << corpus.cell_groups.size() << " cells) into "
            << cfg.corpus_dir.string() << "\n";
  return failures == 0 ? kExitOk : kExitInput;
}

int cmd_build(const Overrides& o) {
  const auto cfg = effective_config(o);
  const auto corpus = load_corpus(cfg.corpus_dir);
  auto providers = make_providers(cfg);
  auto subjects = make_subject_extractor(cfg, providers.completion());
  const auto lifted = lift_all(corpus.cell_groups, *subjects);
  auto graph = build_graph(lifted.facts);
  graph.corpus_hash = corpus_hash(corpus.cell_groups);
  std::set<std::string> known;
  for (const auto& cg : corpus.cell_groups) known.insert(cg.cell_id);
  const auto report = validate_graph(graph, &known);
  if (!lifted.rejected_cell_ids.empty()) {
    std::cout << "cells without an attribute (not indexed): " << lifted.rejected_cell_ids.size() << "\n";
  }
  std::cout << "subjects " << report.subjects << ", periods " << report.temporals << ", attributes "
            << report.attributes << ", leaves " << report.leaves << ", keys " << report.keys << "\n";
  if (!report.ok()) {
    std::cerr << "graph validation failed; index not written\n";
    for (const auto& f : report.findings) std::cerr << "  " << f.check << ": " << f.detail << "\n";
    return kExitValidation;
  }
  save_graph(graph, cfg.index_path);
  std::cout << "index written to " << cfg.index_path.string() << "\n";
  return kExitOk;
}

struct Loaded {
  Corpus corpus;
  SATGraph graph;
  std::vector<Chunk> chunks;
};

Loaded load_all(const AppConfig& cfg) {
  Loaded l;
  l.corpus = load_corpus(cfg.corpus_dir);
  l.graph = load_graph(cfg.index_path);
  if (l.graph.corpus_hash != corpus_hash(l.corpus.cell_groups)) {
    spdlog::warn("index was built from a different corpus; rebuild it with 'satrag build'");
  }
  l.chunks = build_chunks(l.corpus);
  return l;
}

std::string fmt_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", s);
  return buf;
}

int cmd_query(const Overrides& o, const std::string& question, int flag) {
  const auto cfg = effective_config(o);
  const auto l = load_all(cfg);
  auto providers = make_providers(cfg);
  LexiconAnalyzer analyzer(l.graph);
  const Query q{question, flag};
  const auto result = retrieve({l.graph, l.chunks, providers.embedder(), analyzer}, q, cfg.retrieval);

  const auto& s = result.slots;
  std::cout << "slots: subject=" << s.subject_hint.value_or("-") << " period=" << s.temporal_hint.value_or("-")
            << " attribute=" << s.attribute_hint.value_or("-") << " intent=" << to_string(s.intent) << "\n";
  for (const auto& note : result.diagnostics.notes) std::cout << "note: " << note << "\n";

  EvidencePackage pkg;
  if (cfg.retrieval.mode == RetrievalMode::SatGraph) {
    pkg = build_package(l.graph, l.corpus, result.tuples, q, cfg.retrieval, cfg.fusion, providers.embedder());
    std::cout << "evidence:\n";
    for (std::size_t i = 0; i < pkg.facts.size(); ++i) {
      const auto& t = pkg.facts[i].source;
      std::cout << "  " << i + 1 << ". " << pkg.facts[i].statement << "  [cell " << t.cell_id << ", score "
                << fmt_score(t.score) << (t.hop > 0 ? ", neighbor hop " + std::to_string(t.hop) : "") << "]\n";
    }
  } else {
    pkg = build_chunk_package(l.chunks, result.chunks, q);
    std::cout << "chunks:\n";
  }
  if (!pkg.passages.empty()) {
    std::cout << (cfg.retrieval.mode == RetrievalMode::SatGraph ? "passages:\n" : "");
    for (std::size_t i = 0; i < pkg.passages.size(); ++i) {
      std::cout << "  P" << i + 1 << ". " << pkg.passages[i].key << " (score " << fmt_score(pkg.passages[i].score)
                << "): " << pkg.passages[i].text << "\n";
    }
  }
  if (pkg.facts.empty() && pkg.passages.empty()) {
    std::cout << "answer:\n(no evidence found)\n";
    return kExitOk;
  }
  const auto prompt = assemble_prompt(pkg, cfg.fusion.prompt_budget);
  std::cout << "answer:\n";
  if (providers.completion() == nullptr) {
    std::cout << prompt_section(prompt, "Facts:") << prompt_section(prompt, "Passages:");
    return kExitOk;
  }
  const auto answer = generate_answer(prompt, pkg, *providers.completion());
  std::cout << answer.text << (answer.text.empty() || answer.text.back() == '\n' ? "" : "\n");
  for (const auto& d : answer.diagnostics) std::cout << "note: " << d << "\n";
  return kExitOk;
}

int cmd_eval(const Overrides& o, const std::string& qa_file, const std::string& out_dir, bool sweep) {
  const auto cfg = effective_config(o);
  const auto items = load_qa_file(qa_file);
  const auto l = load_all(cfg);
  auto providers = make_providers(cfg);
  LexiconAnalyzer analyzer(l.graph);
  const EvalContext ctx{l.graph, l.corpus, l.chunks, providers.embedder(), analyzer, providers.completion()};

  const auto base = eval_config(cfg);
  std::vector<EvalConfig> runs = sweep ? ablation_configs(base) : std::vector<EvalConfig>{base};
  if (!sweep) runs.front().label = cfg.retrieval.mode == RetrievalMode::SatGraph ? "full" : "w/o SAT";

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir + ": " + ec.message());
  for (const auto& run : runs) {
    const auto out = run_eval(ctx, items, run);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : out.reports) {
      std::cout << r.to_table() << "\n";
      reports.push_back(r.to_json());
    }
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& oc : out.outcomes) outcomes.push_back(oc.to_json());
    const auto path = std::filesystem::path(out_dir) / ("report_" + label_slug(run.label) + ".json");
    write_file(path, nlohmann::json{{"label", run.label}, {"reports", reports}, {"queries", outcomes}}.dump(2) + "\n");
    std::cout << "report written to " << path.string() << "\n\n";
  }
  return kExitOk;
}

int cmd_gen_qa(const Overrides& o, const std::string& out_dir, std::optional<std::size_t> n_pairs,
               const std::vector<std::string>& associations, bool paraphrase) {
  auto cfg = effective_config(o);
  if (n_pairs) cfg.gen.n_pairs = *n_pairs;
  if (!associations.empty()) {
    cfg.gen.associations.clear();
    for (const auto& a : associations) cfg.gen.associations.push_back(parse_association(a));
  }
  if (paraphrase) cfg.gen.paraphrase = true;
  auto corpus = load_corpus(cfg.corpus_dir);
  auto providers = make_providers(cfg);
  if (providers.completion() == nullptr) {
    throw Error(ErrorCode::ConfigError, "gen-qa needs a completion provider (or a scripted double)");
  }
  const auto result = generate_qa(corpus, *providers.completion(), cfg.gen);
  write_gen_outputs(result, out_dir);
  if (cfg.gen.paraphrase && result.report.passages_paraphrased > 0) save_corpus(corpus, cfg.corpus_dir);
  const auto& r = result.report;
  std::cout << "pairs drawn " << r.pairs_drawn << ", accepted " << r.accepted << ", rejected " << r.rejected
            << ", unparseable " << r.unparseable << ", duplicates " << r.duplicates << "\n";
  for (const auto& [reason, count] : r.rejection_reasons) std::cout << "  rejected (" << count << "): " << reason << "\n";
  for (const auto& note : r.notes) std::cout << "note: " << note << "\n";
  std::cout << "wrote " << out_dir << "/qa_f0.jsonl, qa_f1.jsonl, gen_report.json\n";
  if (r.accepted == 0) {
    std::cerr << "error: no pair was accepted\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Table-and-text retrieval over a subject/attribute/period graph"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "JSON config file (comments allowed)");
  app.add_flag("-v,--verbose", o.verbose, "Debug logging and effective-config echo");
  app.add_option("--seed", o.seed, "Seed for dataset generation");
  app.add_option("--corpus", o.corpus_dir, "Corpus store directory");
  app.add_option("--index", o.index_path, "Graph index file");

  std::string input_dir;
  bool enrich = false;
  auto* ingest = app.add_subcommand("ingest", "Parse Markdown/JSON documents into a corpus store");
  ingest->add_option("input_dir", input_dir, "Directory of .md/.markdown/.json documents")->required();
  ingest->add_flag("--enrich", enrich, "Fill missing entities with the completion provider");
  ingest->add_option("--completion", o.completion, "Completion provider kind for --enrich");

  auto* build = app.add_subcommand("build", "Lift cell groups and persist a validated graph");

  std::string question;
  int flag = 0;
  auto* query = app.add_subcommand("query", "Answer a question from the graph");
  query->add_option("question", question, "Question text")->required();
  query->add_option("--flag", flag, "1 when surrounding text is needed")->check(CLI::Range(0, 1));
  add_retrieval_flags(query, o);

  std::string qa_file;
  std::string out_dir = "reports";
  bool sweep = false;
  auto* eval = app.add_subcommand("eval", "Score retrieval and answers on a QA file");
  eval->add_option("qa_file", qa_file, "QA JSONL file")->required();
  eval->add_option("--out", out_dir, "Directory for report files");
  eval->add_flag("--ablation-sweep", sweep, "Run full, w/o SAT, w/o SNE and w/o fusion");
  add_retrieval_flags(eval, o);

  std::string gen_dir;
  std::optional<std::size_t> n_pairs;
  std::vector<std::string> associations;
  bool paraphrase = false;
  auto* gen = app.add_subcommand("gen-qa", "Generate f=0/f=1 QA files from the corpus");
  gen->add_option("out_dir", gen_dir, "Output directory")->required();
  gen->add_option("--n-pairs", n_pairs, "Pairs per association");
  gen->add_option("--association", associations, "same-date, same-subject, same-entity or random");
  gen->add_flag("--paraphrase", paraphrase, "Rewrite passages that repeat gold values");
  gen->add_option("--completion", o.completion, "Completion provider kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, input_dir, enrich);
    if (build->parsed()) return cmd_build(o);
    if (query->parsed()) return cmd_query(o, question, flag);
    if (eval->parsed()) return cmd_eval(o, qa_file, out_dir, sweep);
    if (gen->parsed()) return cmd_gen_qa(o, gen_dir, n_pairs, associations, paraphrase);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace satrag::cli
