#include "standoff/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "standoff/cdm_store.hpp"
#include "standoff/concept_tagger.hpp"
#include "standoff/errors.hpp"
#include "standoff/external_format.hpp"
#include "standoff/graph_tools.hpp"
#include "standoff/section_detector.hpp"
#include "standoff/segments.hpp"
#include "standoff/text_segmentation.hpp"

namespace standoff {

namespace fs = std::filesystem;

namespace {

std::size_t positive_setting(const Config& c, std::string_view key, std::size_t fallback) {
  const auto v = c.get_int(key);
  if (!v) return fallback;
  if (*v <= 0) throw ValidationError("config: " + std::string(key) + " must be a positive integer");
  return static_cast<std::size_t>(*v);
}

std::optional<fs::path> existing_path(const Config& c, std::string_view key) {
  auto p = c.get_path(key);
  if (p && !fs::exists(*p)) {
    throw ValidationError("config: " + std::string(key) + " names a missing file: " + p->string());
  }
  return p;
}

}  // namespace

PipelineConfig PipelineConfig::from(const Config& c) {
  PipelineConfig p;
  if (const auto s = c.get("store")) {
    // Connection strings pass through; a bare path is relative to the
    // config file like every other path.
    p.store = s->starts_with("sqlite:") || s->find("://") != std::string::npos ? *s : c.get_path("store")->string();
  }
  p.guideline = existing_path(c, "guideline");
  p.lexicon_terms = existing_path(c, "lexicon.terms");
  p.lexicon_tui = existing_path(c, "lexicon.tui");
  p.lexicon_pos = existing_path(c, "lexicon.pos");
  p.lexicon_function_words = existing_path(c, "lexicon.function_words");
  p.abbreviations = existing_path(c, "abbreviations");
  p.max_phrase_tokens = positive_setting(c, "tagger.max_phrase_tokens", p.max_phrase_tokens);
  p.min_support = positive_setting(c, "mining.min_support", p.min_support);
  p.max_nodes = positive_setting(c, "mining.max_nodes", p.max_nodes);
  p.jobs = positive_setting(c, "jobs", p.jobs);
  if (const auto conv = c.get("convention")) p.convention = parse_convention(*conv);
  return p;
}

namespace {

// Thrown to leave a command with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

struct Session {
  PipelineConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

bool is_memory_store(std::string_view conn) { return conn == "sqlite::memory:" || conn == ":memory:"; }

CdmStore open_initialized(const Session& s) {
  auto store = CdmStore::open(s.cfg.store);
  if (store.existing_tables().size() < CdmStore::table_names().size()) {
    throw Exit{kExitMissingPrerequisite, "store " + s.cfg.store + " is not initialized; run 'init' first"};
  }
  return store;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DocumentId require_document(CdmStore& store, const std::string& name) {
  const auto id = store.find_document(name);
  if (!id) throw NotFoundError("no document named '" + name + "' in the store");
  return *id;
}

CorpusId require_corpus(CdmStore& store, const std::string& name) {
  const auto id = store.find_corpus(name);
  if (!id) throw NotFoundError("no corpus named '" + name + "'");
  return *id;
}

Interval parse_span(std::string_view text, OffsetConvention c) {
  const auto colon = text.find(':');
  Offset v[2] = {0, 0};
  const std::string_view parts[2] = {text.substr(0, colon),
                                     colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1)};
  for (int i = 0; i < 2; ++i) {
    const auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v[i]);
    if (parts[i].empty() || ec != std::errc{} || ptr != parts[i].data() + parts[i].size()) {
      throw ValidationError("span '" + std::string(text) + "' is not START:END");
    }
  }
  return from_display(v[0], v[1], c);
}

// --- init -------------------------------------------------------------------

int cmd_init(Session& s) {
  auto store = CdmStore::open(s.cfg.store);
  const auto created = store.init_schema();
  s.out << created.size() << " tables created\n";
  return kExitOk;
}

// --- import -----------------------------------------------------------------

struct ImportOptions {
  std::vector<std::string> files;
  std::vector<std::string> annotations;
  std::string corpus;
  std::string name;
  bool inline_xml = false;
};

int cmd_import(Session& s, const ImportOptions& o) {
  auto store = open_initialized(s);
  if (!o.name.empty() && o.files.size() != 1) throw ValidationError("--name needs exactly one input file");
  std::optional<CorpusId> corpus;
  if (!o.corpus.empty()) {
    corpus = store.find_corpus(o.corpus);
    if (!corpus) corpus = store.create_corpus(o.corpus);
  }
  bool partial = false;

  for (const auto& file : o.files) {
    try {
      const fs::path path(file);
      const auto content = read_file(path);
      const std::string stem = path.stem().string();
      std::vector<Document> docs;
      if (o.inline_xml) {
        const auto records = split_records(content);
        if (records.empty()) {
          docs.push_back(to_document(o.name.empty() ? stem : o.name, convert_inline(content)));
        } else {
          for (const auto& r : records) docs.push_back(to_document(stem + "-" + r.id, r.converted));
        }
      } else {
        docs.emplace_back(o.name.empty() ? stem : o.name, content);
      }
      for (auto& doc : docs) {
        auto existing = store.find_document(doc.name());
        if (existing) {
          s.out << doc.name() << ": already in the store\n";
        } else {
          doc.set_source(path.string());
          const auto counts = store.marshal_document(doc);
          existing = doc.id();
          s.out << doc.name() << ": imported, " << counts.annotation_rows << " annotations\n";
        }
        if (corpus) store.add_to_corpus(*corpus, *existing);
      }
    } catch (const Error& e) {
      s.err << file << ": " << e.what() << '\n';
      partial = true;
    }
  }

  for (const auto& file : o.annotations) {
    try {
      std::vector<std::string> names;
      {
        std::ifstream in(file);
        if (!in) throw NotFoundError("cannot read " + file);
        for (const auto& r : parse_external_annotations(in)) {
          if (std::find(names.begin(), names.end(), r.doc_name) == names.end()) names.push_back(r.doc_name);
        }
      }
      for (const auto& name : names) {
        try {
          auto doc = store.unmarshal_document(require_document(store, name));
          const auto added = import_external_annotations(doc, fs::path(file));
          store.checkpoint(doc);
          s.out << name << ": +" << added << " annotations from " << file << '\n';
        } catch (const Error& e) {
          s.err << file << ": " << name << ": " << e.what() << '\n';
          partial = true;
        }
      }
    } catch (const Error& e) {
      s.err << file << ": " << e.what() << '\n';
      partial = true;
    }
  }
  return partial ? kExitPartial : kExitOk;
}

// --- run --------------------------------------------------------------------

enum class Stage { kSections, kSentences, kTokenize, kConcepts, kGraphs };

// Execution order, whatever order the stages were named in.
constexpr Stage kStageOrder[] = {Stage::kSections, Stage::kSentences, Stage::kTokenize, Stage::kConcepts,
                                 Stage::kGraphs};

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::kSections: return "sections";
    case Stage::kSentences: return "sentences";
    case Stage::kTokenize: return "tokenize";
    case Stage::kConcepts: return "concepts";
    case Stage::kGraphs: return "graphs";
  }
  return "?";
}

std::string stage_marker(Stage s) { return "stage." + stage_name(s); }

// A stage counts as done when an earlier run marked it, or when the
// document already has what it would produce (e.g. imported tokens).
bool stage_done(const Document& doc, Stage s) {
  if (doc.metadata().count(stage_marker(s))) return true;
  const auto& idx = doc.index();
  switch (s) {
    case Stage::kSections: return !idx.of_type(types::kSection).empty();
    case Stage::kSentences: return !idx.of_type(types::kSentence).empty();
    case Stage::kTokenize: return !idx.of_type(types::kToken).empty();
    case Stage::kConcepts: return !idx.of_type(types::kCui).empty();
    case Stage::kGraphs: return false;
  }
  return false;
}

struct Resources {
  std::optional<Guideline> guideline;
  std::optional<Lexicon> lexicon;
  SentenceSplitterOptions splitter;
};

struct RunOptions {
  std::vector<std::string> stages;
  std::vector<std::string> documents;
  std::string corpus;
};

struct Outcome {
  std::vector<std::string> parts;
  std::size_t written = 0;
  bool done = false;
  std::string error;
};

std::size_t build_graphs(Document& doc, CdmStore& store) {
  std::vector<Annotation> sentences;
  for (const auto* a : doc.index().of_type(types::kSentence)) sentences.push_back(*a);
  if (sentences.empty()) {
    Annotation whole;
    whole.type = types::kSentence;
    whole.span = Interval(0, doc.length());
    sentences.push_back(whole);
  }
  std::size_t n = 0;
  for (const auto& sentence : sentences) {
    const auto deps = doc.index().within(sentence.span, types::kDependency);
    const auto concepts = doc.index().within(sentence.span, types::kCui);
    auto built = build_dependency_graph(doc, sentence, deps, concepts);
    if (built.graph.nodes.empty()) continue;
    persist_graph(store, built.graph);
    ++n;
  }
  return n;
}

Outcome process_document(Document& doc, CdmStore& store, const Resources& res, const std::vector<Stage>& stages,
                         bool parallel_kernels) {
  Outcome o;
  for (Stage st : stages) {
    const auto name = stage_name(st);
    if (stage_done(doc, st)) {
      o.parts.push_back(name + " reused");
      continue;
    }
    std::size_t graphs = 0;
    switch (st) {
      case Stage::kSections:
        detect_sections(doc, *res.guideline);
        match_templates(doc, *res.guideline);
        break;
      case Stage::kSentences:
        for (auto& a : split_sentences(doc, res.splitter)) doc.add_annotation(std::move(a));
        break;
      case Stage::kTokenize:
        for (auto& a : tokenize(doc)) doc.add_annotation(std::move(a));
        break;
      case Stage::kConcepts:
        annotate_all_concepts(doc, *res.lexicon, parallel_kernels);
        annotate_tuis(doc, *res.lexicon);
        annotate_sp_pos(doc, *res.lexicon);
        break;
      case Stage::kGraphs:
        graphs = build_graphs(doc, store);
        break;
    }
    doc.set_metadata(stage_marker(st), "done");
    const auto n = store.checkpoint(doc);
    o.written += n;
    o.parts.push_back(name + " +" + std::to_string(n) + (st == Stage::kGraphs ? " (" + std::to_string(graphs) + " graphs)" : ""));
  }
  o.done = true;
  return o;
}

int cmd_run(Session& s, const RunOptions& o) {
  std::set<std::string> wanted(o.stages.begin(), o.stages.end());
  std::vector<Stage> stages;
  for (Stage st : kStageOrder) {
    if (wanted.count(stage_name(st))) stages.push_back(st);
  }
  const auto want = [&](Stage st) { return std::find(stages.begin(), stages.end(), st) != stages.end(); };

  auto store = open_initialized(s);
  Resources res;
  if (want(Stage::kSections)) {
    if (!s.cfg.guideline) throw Exit{kExitMissingPrerequisite, "the sections stage needs 'guideline' in the config"};
    res.guideline = load_guideline(*s.cfg.guideline);
  }
  if (want(Stage::kConcepts)) {
    if (!s.cfg.lexicon_terms) {
      throw Exit{kExitMissingPrerequisite, "the concepts stage needs 'lexicon.terms' in the config"};
    }
    res.lexicon = load_lexicon({*s.cfg.lexicon_terms, s.cfg.lexicon_tui, s.cfg.lexicon_pos,
                                s.cfg.lexicon_function_words, s.cfg.max_phrase_tokens});
  }
  if (s.cfg.abbreviations) res.splitter.abbreviations = load_abbreviations(*s.cfg.abbreviations);

  bool partial = false;
  std::vector<DocumentId> ids;
  if (!o.documents.empty()) {
    // A stored document name, or a text file imported under its stem.
    for (const auto& arg : o.documents) {
      try {
        if (const auto id = store.find_document(arg)) {
          ids.push_back(*id);
          continue;
        }
        const fs::path path(arg);
        if (!fs::is_regular_file(path)) throw NotFoundError("no document or file named '" + arg + "'");
        if (const auto id = store.find_document(path.stem().string())) {
          ids.push_back(*id);
          continue;
        }
        Document doc(path.stem().string(), read_file(path));
        doc.set_source(path.string());
        store.marshal_document(doc);
        ids.push_back(doc.id());
      } catch (const Error& e) {
        s.err << arg << ": " << e.what() << '\n';
        partial = true;
      }
    }
  } else if (!o.corpus.empty()) {
    const auto corpus = store.load_corpus(require_corpus(store, o.corpus));
    ids.assign(corpus.documents.begin(), corpus.documents.end());
  } else {
    for (const auto& d : store.list_documents()) ids.push_back(d.id);
  }

  std::vector<Document> docs;
  docs.reserve(ids.size());
  for (auto id : ids) docs.push_back(store.unmarshal_document(id));

  // Prerequisites are checked for every document before anything runs.
  std::vector<std::string> gaps;
  for (const auto& doc : docs) {
    const auto has = [&](Stage st, const char* type) {
      return want(st) || !doc.index().of_type(type).empty();
    };
    if (want(Stage::kConcepts) && !stage_done(doc, Stage::kConcepts) && !has(Stage::kTokenize, types::kToken)) {
      gaps.push_back(doc.name() + ": concepts needs tokens (add the tokenize stage)");
    }
    if (want(Stage::kGraphs) && !stage_done(doc, Stage::kGraphs)) {
      if (!has(Stage::kTokenize, types::kToken)) gaps.push_back(doc.name() + ": graphs needs tokens (add the tokenize stage)");
      if (!has(Stage::kConcepts, types::kCui)) gaps.push_back(doc.name() + ": graphs needs concepts (add the concepts stage)");
      if (doc.index().of_type(types::kDependency).empty()) {
        gaps.push_back(doc.name() + ": graphs needs dependency annotations (import them first)");
      }
    }
  }
  if (!gaps.empty()) {
    for (const auto& g : gaps) s.err << "missing prerequisite: " << g << '\n';
    return kExitMissingPrerequisite;
  }

  const std::size_t workers = is_memory_store(s.cfg.store) ? 1 : std::max<std::size_t>(1, std::min(s.cfg.jobs, docs.size()));
  std::vector<Outcome> outcomes(docs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&](CdmStore& st, bool parallel_kernels) {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      try {
        outcomes[i] = process_document(docs[i], st, res, stages, parallel_kernels);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    work(store, true);
  } else {
    // One connection per worker; SQLite serializes the writes.
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          auto own = CdmStore::open(s.cfg.store);
          work(own, false);
        } catch (const std::exception&) {
          // documents this worker never took are picked up by the others
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::size_t written = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& oc = outcomes[i];
    if (!oc.done) {
      s.err << docs[i].name() << ": failed: " << (oc.error.empty() ? "not processed" : oc.error) << '\n';
      partial = true;
    }
    std::string line;
    for (const auto& p : oc.parts) line += (line.empty() ? "" : ", ") + p;
    if (!line.empty()) s.out << docs[i].name() << ": " << line << '\n';
    written += oc.written;
  }
  s.out << written << " annotations written\n";
  return partial ? kExitPartial : kExitOk;
}

// --- query / segments -------------------------------------------------------

struct QueryOptions {
  std::string document;
  std::string relation;
  Offset start = 0;
  Offset end = 0;
  std::string type;
};

std::string relation_list() {
  std::string out;
  for (auto r : kAllRelations) out += (out.empty() ? "" : ", ") + std::string(relation_name(r));
  return out;
}

int cmd_query(Session& s, const QueryOptions& o) {
  const auto rel = parse_relation(o.relation);
  if (!rel) throw Exit{kExitUnknownRelation, "unknown relation '" + o.relation + "'; valid relations: " + relation_list()};
  auto store = open_initialized(s);
  const auto doc = store.unmarshal_document(require_document(store, o.document));
  const auto b = from_display(o.start, o.end, s.cfg.convention);
  std::optional<std::string_view> type;
  if (!o.type.empty()) type = o.type;
  for (const auto* a : doc.annotations_satisfying(*rel, b, type)) {
    const auto [st, en] = to_display(a->span, s.cfg.convention);
    s.out << st << '\t' << en << '\t' << a->type << '\t' << escape(a->value) << '\n';
  }
  return kExitOk;
}

struct SegmentOptions {
  std::string document;
  std::string first;
  std::string second;
  std::string sentence;
};

int cmd_segments(Session& s, const SegmentOptions& o) {
  auto store = open_initialized(s);
  const auto doc = store.unmarshal_document(require_document(store, o.document));
  const auto c1 = parse_span(o.first, s.cfg.convention);
  const auto c2 = parse_span(o.second, s.cfg.convention);
  Interval sentence;
  if (!o.sentence.empty()) {
    sentence = parse_span(o.sentence, s.cfg.convention);
  } else {
    const auto sentences = doc.index().of_type(types::kSentence);
    const auto it = std::find_if(sentences.begin(), sentences.end(), [&](const Annotation* a) {
      return a->span.start() <= c1.start() && c1.end() <= a->span.end();
    });
    if (it == sentences.end()) throw ValidationError("no sentence annotation contains the first concept");
    sentence = (*it)->span;
  }
  const auto seg = segment_context(c1, c2, sentence);
  const std::pair<const char*, Interval> rows[] = {{"preceding", seg.preceding},
                                                   {"concept1", seg.concept1},
                                                   {"between", seg.between},
                                                   {"concept2", seg.concept2},
                                                   {"succeeding", seg.succeeding}};
  for (const auto& [name, span] : rows) {
    const auto [st, en] = to_display(span, s.cfg.convention);
    s.out << name << '\t' << st << '\t' << en << '\t' << escape(doc.text(span)) << '\n';
  }
  return kExitOk;
}

// --- convert ----------------------------------------------------------------

struct ConvertOptions {
  std::string input;
  std::string out_dir;
  RecordOptions records;
};

int cmd_convert(Session& s, const ConvertOptions& o) {
  const fs::path path(o.input);
  const auto content = read_file(path);
  std::vector<std::pair<std::string, ConversionResult>> units;
  bool as_records = false;
  try {
    auto records = split_records(content, o.records);
    if (records.empty()) {
      units.emplace_back(path.stem().string(), convert_inline(content));
    } else {
      as_records = true;
      for (auto& r : records) units.emplace_back(path.stem().string() + "-" + r.id, std::move(r.converted));
    }
  } catch (const ParseError& e) {
    throw Exit{kExitMalformedXml,
               o.input + ": malformed XML at byte offset " + std::to_string(e.offset()) + ": " + e.what()};
  }

  const fs::path out_dir = o.out_dir.empty() ? path.parent_path() : fs::path(o.out_dir);
  if (!out_dir.empty()) fs::create_directories(out_dir);
  for (const auto& [name, result] : units) {
    if (as_records) s.out << "# record " << name << '\n';
    write_offset_table(s.out, render_offsets(result.annotations, s.cfg.convention));
    const fs::path base = out_dir / name;
    std::ofstream text(base.string() + ".txt", std::ios::binary);
    text << result.text;
    std::ofstream ann(base.string() + ".ann", std::ios::binary);
    export_annotations(to_document(name, result), ann);
    if (!text || !ann) throw Error("cannot write " + base.string() + ".txt/.ann");
  }
  return kExitOk;
}

// --- graph-mine / export ------------------------------------------------------

struct MineOptions {
  std::string input;
  std::string output;
  std::string graph_type = kDependencyGraphType;
  std::size_t min_support = 0;
  std::size_t max_nodes = 0;
};

int cmd_graph_mine(Session& s, const MineOptions& o) {
  omp_set_num_threads(static_cast<int>(s.cfg.jobs));
  std::vector<LabeledGraph> graphs;
  std::optional<CdmStore> store;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw NotFoundError("cannot read " + o.input);
    graphs = read_graphs(in);
  } else {
    store.emplace(open_initialized(s));
    for (auto id : list_graphs(*store, o.graph_type)) graphs.push_back(load_graph(*store, id));
  }
  MiningOptions mo;
  mo.min_support = o.min_support ? o.min_support : s.cfg.min_support;
  mo.max_nodes = o.max_nodes ? o.max_nodes : s.cfg.max_nodes;
  const auto patterns = mine_frequent_subgraphs(graphs, mo);

  if (store) {
    // Replace earlier results; rows in sig_subgraph and lg_sigsub cascade.
    store->connection().exec("DELETE FROM graphs WHERE type = 'sig_subgraph'");
    persist_mining_results(*store, graphs, patterns);
  }
  s.out << graphs.size() << " graphs, " << patterns.size() << " patterns\n";
  for (const auto& p : patterns) {
    s.out << p.support << '\t' << p.pattern.nodes.size() << '\t' << p.pattern.edges.size() << '\t' << escape(p.code)
          << '\n';
  }
  if (!o.output.empty()) {
    std::vector<LabeledGraph> out;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      out.push_back(patterns[i].pattern);
      out.back().id = static_cast<GraphId>(i + 1);
      out.back().name = "pattern-" + std::to_string(i + 1) + "-support-" + std::to_string(patterns[i].support);
    }
    std::ofstream f(o.output);
    write_graphs(f, out);
    if (!f) throw Error("cannot write " + o.output);
  }
  return kExitOk;
}

struct ExportOptions {
  std::vector<std::string> documents;
  std::string type;
  std::string output;
  bool graphs = false;
  std::string graph_type;
};

int cmd_export(Session& s, const ExportOptions& o) {
  auto store = open_initialized(s);
  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output, std::ios::binary);
    if (!file) throw Error("cannot write " + o.output);
  }
  std::ostream& os = o.output.empty() ? s.out : file;
  if (o.graphs) {
    std::vector<LabeledGraph> graphs;
    for (auto id : list_graphs(store, o.graph_type)) graphs.push_back(load_graph(store, id));
    write_graphs(os, graphs);
    return kExitOk;
  }
  std::vector<DocumentId> ids;
  if (o.documents.empty()) {
    for (const auto& d : store.list_documents()) ids.push_back(d.id);
  } else {
    for (const auto& name : o.documents) ids.push_back(require_document(store, name));
  }
  std::optional<std::string_view> type;
  if (!o.type.empty()) type = o.type;
  for (auto id : ids) export_annotations(store.unmarshal_document(id), os, type);
  return kExitOk;
}

// --- instances ----------------------------------------------------------------

struct InstanceOptions {
  std::string corpus;
  std::string kind;
  std::vector<std::string> documents;
  std::vector<std::int64_t> ids;
  std::string set_name;
  std::string purpose;
  std::int64_t instance = 0;
  std::string task;
  std::string label;
};

int cmd_instances_create(Session& s, const InstanceOptions& o) {
  auto store = open_initialized(s);
  const auto corpus = require_corpus(store, o.corpus);
  const auto kind = parse_instance_kind(o.kind);
  std::vector<std::int64_t> content = o.ids;
  for (const auto& name : o.documents) content.push_back(require_document(store, name));
  const auto id = store.create_instance(corpus, kind, content);
  s.out << "instance " << id << '\n';
  return kExitOk;
}

int cmd_instances_set(Session& s, const InstanceOptions& o) {
  auto store = open_initialized(s);
  const auto id = store.create_instance_set(require_corpus(store, o.corpus), o.set_name, o.purpose, o.ids);
  s.out << "instance set " << id << '\n';
  return kExitOk;
}

int cmd_instances_label(Session& s, const InstanceOptions& o) {
  auto store = open_initialized(s);
  store.set_groundtruth(o.instance, o.task, o.label);
  s.out << "instance " << o.instance << ": " << o.task << " = " << o.label << '\n';
  return kExitOk;
}

int cmd_instances_show(Session& s, const InstanceOptions& o) {
  auto store = open_initialized(s);
  const auto set = store.find_instance_set(require_corpus(store, o.corpus), o.set_name);
  if (!set) throw NotFoundError("no instance set named '" + o.set_name + "'");
  for (auto id : store.instance_set_members(*set)) {
    std::string content;
    for (auto c : store.instance_content(id)) content += (content.empty() ? "" : ",") + std::to_string(c);
    s.out << id << '\t' << instance_kind_name(store.instance_kind(id)) << '\t' << content;
    if (!o.task.empty()) s.out << '\t' << store.groundtruth(id, o.task).value_or("");
    s.out << '\n';
  }
  return kExitOk;
}

std::pair<int, std::string> classify(const std::exception& e) {
  if (dynamic_cast<const StoreUnreachableError*>(&e)) return {kExitStoreUnreachable, e.what()};
  if (dynamic_cast<const MigrationRequiredError*>(&e)) return {kExitMissingPrerequisite, e.what()};
  return {kExitInvalidInput, e.what()};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stand-off annotation pipeline backed by a relational store", "standoff"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, convention, store_override;
  std::size_t jobs = 0;
  app.add_option("--config", config_path, "key=value settings file");
  app.add_option("--convention", convention, "offset display convention")
      ->check(CLI::IsMember({"half-open-0", "inclusive-1"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--store", store_override, "store connection string (overrides the config)");

  auto* init = app.add_subcommand("init", "create the schema");

  ImportOptions imp;
  auto* import = app.add_subcommand("import", "add text documents and external annotation files");
  import->add_option("files", imp.files, "text files (or inline XML with --inline)");
  import->add_option("--annotations", imp.annotations, "external annotation file")->allow_extra_args(false);
  import->add_option("--corpus", imp.corpus, "add the documents to this corpus (created if missing)");
  import->add_option("--name", imp.name, "document name for a single file (default: file stem)");
  import->add_flag("--inline", imp.inline_xml, "inputs are inline-annotated XML");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run pipeline stages on stored documents");
  run_cmd->add_option("documents", run.documents, "stored document names or text files to import (default: all)");
  run_cmd->add_option("--stages", run.stages, "comma separated: sections,sentences,tokenize,concepts,graphs")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"sections", "sentences", "tokenize", "concepts", "graphs"}));
  run_cmd->add_option("--corpus", run.corpus, "only documents of this corpus");

  QueryOptions q;
  auto* query = app.add_subcommand("query", "annotations standing in a relation to a span");
  query->add_option("document", q.document)->required();
  query->add_option("--rel", q.relation, "relation tag, e.g. during")->required();
  query->add_option("--start", q.start)->required();
  query->add_option("--end", q.end)->required();
  query->add_option("--type", q.type, "annotation type filter");

  SegmentOptions seg;
  auto* segments = app.add_subcommand("segments", "five-way split of a sentence around two concepts");
  segments->add_option("document", seg.document)->required();
  segments->add_option("--c1", seg.first, "first concept START:END")->required();
  segments->add_option("--c2", seg.second, "second concept START:END")->required();
  segments->add_option("--sentence", seg.sentence, "sentence START:END (default: the sentence holding --c1)");

  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "inline XML to plain text plus stand-off annotations");
  convert->add_option("input", conv.input)->required();
  convert->add_option("--out-dir", conv.out_dir, "where NAME.txt and NAME.ann go (default: next to the input)");
  convert->add_option("--record-element", conv.records.record_element);
  convert->add_option("--text-element", conv.records.text_element);

  MineOptions mine;
  auto* graph_mine = app.add_subcommand("graph-mine", "mine frequent subgraphs");
  graph_mine->add_option("--input", mine.input, "graph interchange file instead of the store");
  graph_mine->add_option("--output", mine.output, "write the patterns as a graph interchange file");
  graph_mine->add_option("--type", mine.graph_type, "graph type to mine from the store");
  graph_mine->add_option("--min-support", mine.min_support)->check(CLI::PositiveNumber);
  graph_mine->add_option("--max-nodes", mine.max_nodes)->check(CLI::PositiveNumber);

  ExportOptions exp;
  auto* export_cmd = app.add_subcommand("export", "write annotations (or graphs) in the interchange formats");
  export_cmd->add_option("documents", exp.documents, "document names (default: all)");
  export_cmd->add_option("--type", exp.type, "annotation type filter");
  export_cmd->add_option("--output", exp.output, "file instead of standard output");
  export_cmd->add_flag("--graphs", exp.graphs, "export graphs instead of annotations");
  export_cmd->add_option("--graph-type", exp.graph_type, "graph type filter for --graphs");

  InstanceOptions inst;
  auto* instances = app.add_subcommand("instances", "task instances, instance sets and ground truth");
  instances->require_subcommand(1);
  auto* i_create = instances->add_subcommand("create", "create one instance");
  i_create->add_option("--corpus", inst.corpus)->required();
  i_create->add_option("--kind", inst.kind, "document, annotation_pair or document_set")->required();
  i_create->add_option("--docs", inst.documents, "document names")->delimiter(',');
  i_create->add_option("--ids", inst.ids, "document or annotation ids")->delimiter(',');
  auto* i_set = instances->add_subcommand("set", "group instances into a named set");
  i_set->add_option("--corpus", inst.corpus)->required();
  i_set->add_option("--name", inst.set_name)->required();
  i_set->add_option("--purpose", inst.purpose);
  i_set->add_option("--members", inst.ids, "instance ids")->delimiter(',')->required();
  auto* i_label = instances->add_subcommand("label", "record a ground-truth label");
  i_label->add_option("--instance", inst.instance)->required();
  i_label->add_option("--task", inst.task)->required();
  i_label->add_option("--label", inst.label)->required();
  auto* i_show = instances->add_subcommand("show", "list the members of a set");
  i_show->add_option("--corpus", inst.corpus)->required();
  i_show->add_option("--set", inst.set_name)->required();
  i_show->add_option("--task", inst.task, "also print this task's label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    Config config;
    if (!config_path.empty()) config = Config::load(config_path);
    Session s{PipelineConfig::from(config), out, err};
    if (!store_override.empty()) s.cfg.store = store_override;
    if (!convention.empty()) s.cfg.convention = parse_convention(convention);
    if (jobs > 0) s.cfg.jobs = jobs;
    omp_set_num_threads(static_cast<int>(s.cfg.jobs));

    if (init->parsed()) return cmd_init(s);
    if (import->parsed()) return cmd_import(s, imp);
    if (run_cmd->parsed()) return cmd_run(s, run);
    if (query->parsed()) return cmd_query(s, q);
    if (segments->parsed()) return cmd_segments(s, seg);
    if (convert->parsed()) return cmd_convert(s, conv);
    if (graph_mine->parsed()) return cmd_graph_mine(s, mine);
    if (export_cmd->parsed()) return cmd_export(s, exp);
    if (i_create->parsed()) return cmd_instances_create(s, inst);
    if (i_set->parsed()) return cmd_instances_set(s, inst);
    if (i_label->parsed()) return cmd_instances_label(s, inst);
    if (i_show->parsed()) return cmd_instances_show(s, inst);
    return kExitUsage;
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    const auto [code, message] = classify(e);
    err << "error: " << message << '\n';
    return code;
  }
}

}  // namespace standoff
