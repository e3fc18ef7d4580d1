#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "standoff/cdm_store.hpp"
#include "standoff/cli.hpp"
#include "standoff/external_format.hpp"
#include "standoff/graph_tools.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace standoff;
using standoff::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "standoff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const std::string kNote =
    "HISTORY: Large atypical cells express CD30.\n"
    "PLAN: Cells express CD30 again.\n";

// Dependency records for the two sentences of kNote: express -> cells
// (nsubj) and express -> CD30 (dobj), located with find().
std::string dependency_records(const std::string& doc) {
  std::string out;
  std::size_t from = 0;
  for (int s = 0; s < 2; ++s) {
    const auto ex = kNote.find("express", from);
    const auto cells = s == 0 ? kNote.find("cells", from) : kNote.find("Cells", from);
    const auto cd30 = kNote.find("CD30", from);
    const auto rec = [&](std::size_t dep, std::size_t dep_len, const char* label) {
      ExternalRecord r;
      r.doc_name = doc;
      r.span = Interval(dep, dep + dep_len);
      r.type = "dependency";
      r.value = label;
      r.attributes = {{kHeadStart, std::to_string(ex)}, {kHeadEnd, std::to_string(ex + 7)}};
      return format_external_line(r) + "\n";
    };
    out += rec(cells, 5, "nsubj") + rec(cd30, 4, "dobj");
    from = cd30 + 4;
  }
  return out;
}

// A working directory with a config, guideline, lexicon and two notes.
struct Workspace {
  TempDir dir;
  std::string config = (dir / "standoff.conf").string();

  Workspace() {
    write(dir / "standoff.conf",
          "store=notes.db\nguideline=guideline.xml\nlexicon.terms=terms.tsv\nmining.min_support=2\n");
    write(dir / "guideline.xml",
          "<guideline name=\"g\">\n"
          "  <section name=\"history\"><pattern regex=\"^HISTORY:\"/></section>\n"
          "  <section name=\"plan\"><pattern regex=\"^PLAN:\"/></section>\n"
          "</guideline>\n");
    write(dir / "terms.tsv", "atypical cells\tC_cells\ncells\tC_cells\ncd30\tC_cd30\n");
    write(dir / "note1.txt", kNote);
    write(dir / "note2.txt", kNote);
    write(dir / "deps.ann", dependency_records("note1") + dependency_records("note2"));
  }

  Result run(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--config", config});
    return cli(std::move(args));
  }

  CdmStore store() const { return CdmStore::open((dir / "notes.db").string()); }
};

}  // namespace

TEST_CASE("init creates the schema once") {
  TempDir dir;
  const auto conn = "sqlite:" + (dir / "s.db").string();
  auto r = cli({"--store", conn, "init"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "14 tables created\n");
  r = cli({"init", "--store", conn});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "0 tables created\n");

  CHECK(cli({"--store", "sqlite:" + (dir / "missing" / "x.db").string(), "init"}).code == kExitStoreUnreachable);
  CHECK(cli({"--store", "postgres://nowhere/db", "init"}).code == kExitStoreUnreachable);

  // other commands refuse a store without the schema
  write(dir / "a.txt", "text");
  const auto fresh = "sqlite:" + (dir / "fresh.db").string();
  r = cli({"--store", fresh, "import", (dir / "a.txt").string()});
  CHECK(r.code == kExitMissingPrerequisite);
  CHECK(r.err.find("init") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"--jobs", "0", "init"}).code == kExitUsage);
  CHECK(cli({"--convention", "one-based", "init"}).code == kExitUsage);
  CHECK(cli({"run", "--stages", "parse"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);

  TempDir dir;
  write(dir / "bad.conf", "jobs=-3\n");
  CHECK(cli({"--config", (dir / "bad.conf").string(), "init"}).code == kExitInvalidInput);
  write(dir / "bad.conf", "guideline=nowhere.xml\n");
  const auto r = cli({"--config", (dir / "bad.conf").string(), "init"});
  CHECK(r.code == kExitInvalidInput);
  CHECK(r.err.find("nowhere.xml") != std::string::npos);
}

TEST_CASE("environment overrides the config file") {
  TempDir dir;
  write(dir / "c.conf", "store=from-file.db\n");
  const auto env_store = (dir / "from-env.db").string();
  ::setenv("STANDOFF_STORE", env_store.c_str(), 1);
  const auto r = cli({"--config", (dir / "c.conf").string(), "init"});
  ::unsetenv("STANDOFF_STORE");
  CHECK(r.code == kExitOk);
  CHECK(std::filesystem::exists(env_store));
  CHECK_FALSE(std::filesystem::exists(dir / "from-file.db"));
}

TEST_CASE("pipeline stages, prerequisites and reuse") {
  Workspace ws;
  REQUIRE(ws.run({"init"}).code == kExitOk);
  auto r = ws.run({"import", (ws.dir / "note1.txt").string(), (ws.dir / "note2.txt").string(), "--corpus", "c",
                   "--annotations", (ws.dir / "deps.ann").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("note1: +4 annotations") != std::string::npos);

  // importing again skips the existing documents
  r = ws.run({"import", (ws.dir / "note1.txt").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "note1: already in the store\n");
  r = ws.run({"import", (ws.dir / "nope.txt").string(), (ws.dir / "note1.txt").string()});
  CHECK(r.code == kExitPartial);

  // concepts without tokens: nothing runs
  r = ws.run({"run", "--stages", "concepts"});
  CHECK(r.code == kExitMissingPrerequisite);
  CHECK(r.err.find("tokens") != std::string::npos);
  CHECK(ws.store().row_count("annotations") == 8);

  r = ws.run({"run", "--stages", "graphs,concepts,tokenize,sentences,sections"});
  REQUIRE(r.code == kExitOk);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 3);
  // fixed stage order whatever the order on the command line
  CHECK(out[0].find("note1: sections +") == 0);
  CHECK(out[0].find("sentences +2") != std::string::npos);
  CHECK(out[0].find("graphs +0 (2 graphs)") != std::string::npos);
  {
    auto store = ws.store();
    CHECK(list_graphs(store, kDependencyGraphType).size() == 4);
    const auto doc = store.unmarshal_document(*store.find_document("note1"));
    CHECK(doc.index().of_type(types::kSection).size() == 2);
    CHECK(doc.index().of_type(types::kCui).size() == 4);
    CHECK(doc.metadata().at("stage.concepts") == "done");
  }

  // everything is reused on a second run
  r = ws.run({"run", "--stages", "sections,sentences,tokenize,concepts,graphs"});
  CHECK(r.code == kExitOk);
  CHECK(lines(r.out).back() == "0 annotations written");
  CHECK(r.out.find("concepts reused") != std::string::npos);
  CHECK(r.out.find("graphs reused") != std::string::npos);
  {
    auto store = ws.store();
    CHECK(list_graphs(store, kDependencyGraphType).size() == 4);
  }

  // mining over the stored graphs; a rerun replaces the previous result
  r = ws.run({"graph-mine"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("\n4\t3\t2\t") != std::string::npos);
  const auto sig_rows = ws.store().row_count("sig_subgraph");
  CHECK(sig_rows > 0);
  r = ws.run({"graph-mine", "--output", (ws.dir / "patterns.graphs").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(ws.store().row_count("sig_subgraph") == sig_rows);
  std::ifstream pf(ws.dir / "patterns.graphs");
  CHECK(read_graphs(pf).size() == sig_rows);

  // graph export round trips through the interchange format
  r = ws.run({"export", "--graphs", "--graph-type", "dependency"});
  REQUIRE(r.code == kExitOk);
  std::istringstream gs(r.out);
  CHECK(read_graphs(gs).size() == 4);

  r = ws.run({"export", "note1", "--type", "CUI"});
  REQUIRE(r.code == kExitOk);
  std::istringstream es(r.out);
  CHECK(parse_external_annotations(es).size() == 4);
}

TEST_CASE("run takes text files directly") {
  Workspace ws;
  REQUIRE(ws.run({"init"}).code == kExitOk);
  const auto a = (ws.dir / "note1.txt").string(), b = (ws.dir / "note2.txt").string();
  auto r = ws.run({"run", a, b, "--stages", "tokenize,sentences"});
  REQUIRE(r.code == kExitOk);
  {
    auto store = ws.store();
    REQUIRE(store.list_documents().size() == 2);
    for (const auto& d : store.list_documents()) {
      const auto doc = store.unmarshal_document(d.id);
      CHECK(doc.index().of_type(types::kToken).size() == 15);
      CHECK(doc.index().of_type(types::kSentence).size() == 2);
    }
  }
  r = ws.run({"run", a, b, "--stages", "sentences,tokenize"});
  CHECK(r.code == kExitOk);
  CHECK(lines(r.out).back() == "0 annotations written");
  CHECK(ws.store().list_documents().size() == 2);

  // one bad argument: the others are still processed
  r = ws.run({"run", a, (ws.dir / "missing.txt").string(), "--stages", "tokenize"});
  CHECK(r.code == kExitPartial);
  CHECK(r.out.find("note1: tokenize reused") != std::string::npos);
}

TEST_CASE("graphs stage needs dependency annotations") {
  Workspace ws;
  REQUIRE(ws.run({"init"}).code == kExitOk);
  REQUIRE(ws.run({"import", (ws.dir / "note1.txt").string()}).code == kExitOk);
  const auto r = ws.run({"run", "--stages", "tokenize,concepts,graphs"});
  CHECK(r.code == kExitMissingPrerequisite);
  CHECK(r.err.find("dependency") != std::string::npos);
}

TEST_CASE("parallel workers write what a single worker writes") {
  std::string exported[2];
  for (int jobs : {1, 3}) {
    Workspace ws;
    REQUIRE(ws.run({"init"}).code == kExitOk);
    for (int i = 3; i <= 8; ++i) write(ws.dir / ("n" + std::to_string(i) + ".txt"), kNote + std::to_string(i) + " More text.\n");
    std::vector<std::string> args{"import"};
    for (int i = 3; i <= 8; ++i) args.push_back((ws.dir / ("n" + std::to_string(i) + ".txt")).string());
    REQUIRE(ws.run(args).code == kExitOk);
    const auto r = ws.run({"--jobs", std::to_string(jobs), "run", "--stages", "sentences,tokenize,concepts,sections"});
    REQUIRE(r.code == kExitOk);
    const auto e = ws.run({"export"});
    REQUIRE(e.code == kExitOk);
    exported[jobs == 1 ? 0 : 1] = e.out;
  }
  CHECK(exported[0] == exported[1]);
  CHECK(exported[0].find("CUI") != std::string::npos);
}

TEST_CASE("query and segments") {
  Workspace ws;
  REQUIRE(ws.run({"init"}).code == kExitOk);
  REQUIRE(ws.run({"import", (ws.dir / "note1.txt").string()}).code == kExitOk);
  REQUIRE(ws.run({"run", "--stages", "tokenize,sentences"}).code == kExitOk);

  auto store = ws.store();
  const auto doc = store.unmarshal_document(*store.find_document("note1"));
  const auto all = doc.index().all();
  const Interval b(0, 44);
  for (auto rel : kAllRelations) {
    std::string expected;
    for (const auto* a : all) {
      if (standoff::testing::reference_holds(rel, a->span, b)) {
        expected += std::to_string(a->span.start()) + "\t" + std::to_string(a->span.end()) + "\t" + a->type + "\t" +
                    a->value + "\n";
      }
    }
    const auto r = ws.run({"query", "note1", "--rel", std::string(relation_name(rel)), "--start", "0", "--end", "44"});
    CHECK(r.code == kExitOk);
    CHECK_MESSAGE(r.out == expected, relation_name(rel));
  }

  auto r = ws.run({"--convention", "inclusive-1", "query", "note1", "--rel", "eq", "--start", "1", "--end", "43"});
  CHECK(r.out == "1\t43\tsentence\t\n");

  r = ws.run({"query", "note1", "--rel", "inside", "--start", "0", "--end", "4"});
  CHECK(r.code == kExitUnknownRelation);
  CHECK(r.err.find("during") != std::string::npos);

  r = ws.run({"query", "note1", "--rel", "during", "--start", "0", "--end", "0"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(ws.run({"query", "ghost", "--rel", "during", "--start", "0", "--end", "1"}).code == kExitInvalidInput);

  const auto cells = kNote.find("cells");
  const auto cd30 = kNote.find("CD30");
  const auto span = [](std::size_t s, std::size_t n) { return std::to_string(s) + ":" + std::to_string(s + n); };
  r = ws.run({"segments", "note1", "--c1", span(cells, 5), "--c2", span(cd30, 4)});
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "preceding\t0\t24\tHISTORY: Large atypical ");
  CHECK(rows[2] == "between\t29\t38\t express ");
  CHECK(rows[4] == "succeeding\t42\t43\t.");

  r = ws.run({"segments", "note1", "--c1", span(cd30, 4), "--c2", span(cells, 5)});
  CHECK(r.code == kExitInvalidInput);
  r = ws.run({"segments", "note1", "--c1", "3-4", "--c2", span(cells, 5)});
  CHECK(r.code == kExitInvalidInput);
}

TEST_CASE("convert") {
  TempDir dir;
  const std::string phi = STANDOFF_TEST_DATA_DIR "/phi_sentence.xml";
  auto r = cli({"--convention", "inclusive-1", "convert", phi, "--out-dir", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out ==
        "Start\tEnd\tAnnotation Type\tAnnotation Attribute\n48\t83\tPHI\tType=Hospital\n88\t95\tPHI\tType=Date\n");
  std::ifstream txt(dir / "out" / "phi_sentence.txt");
  std::stringstream text;
  text << txt.rdbuf();
  CHECK(text.str().find("Beth Israel Deaconess Medical Center") == 47);
  std::ifstream ann(dir / "out" / "phi_sentence.ann");
  const auto recs = parse_external_annotations(ann);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].span == Interval(47, 83));

  write(dir / "plain.xml", "no markup here\n");
  r = cli({"convert", (dir / "plain.xml").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "Start\tEnd\tAnnotation Type\tAnnotation Attribute\n");
  // files land next to the input; the annotation file is just the header
  std::ifstream plain_ann(dir / "plain.ann");
  std::stringstream plain;
  plain << plain_ann.rdbuf();
  CHECK(plain.str() == std::string(kExternalHeader) + "\n");
  CHECK(std::filesystem::exists(dir / "plain.txt"));

  write(dir / "cut.xml", "on <PHI TYPE=\"Date\">April");
  r = cli({"convert", (dir / "cut.xml").string()});
  CHECK(r.code == kExitMalformedXml);
  CHECK(r.err.find("byte offset") != std::string::npos);

  write(dir / "records.xml",
        "<ROOT><RECORD ID=\"a\"><TEXT>At <PHI TYPE=\"Hospital\">MGH</PHI></TEXT></RECORD>"
        "<RECORD ID=\"b\"><TEXT>none</TEXT></RECORD></ROOT>");
  r = cli({"convert", (dir / "records.xml").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out ==
        "# record records-a\nStart\tEnd\tAnnotation Type\tAnnotation Attribute\n3\t6\tPHI\tType=Hospital\n"
        "# record records-b\nStart\tEnd\tAnnotation Type\tAnnotation Attribute\n");

  CHECK(cli({"convert", (dir / "absent.xml").string()}).code == kExitInvalidInput);
}

TEST_CASE("instances") {
  Workspace ws;
  REQUIRE(ws.run({"init"}).code == kExitOk);
  REQUIRE(ws.run({"import", (ws.dir / "note1.txt").string(), (ws.dir / "note2.txt").string(), "--corpus", "c"}).code ==
          kExitOk);
  auto r = ws.run({"instances", "create", "--corpus", "c", "--kind", "document", "--docs", "note1"});
  REQUIRE(r.code == kExitOk);
  const auto first = r.out.substr(9, r.out.size() - 10);
  r = ws.run({"instances", "create", "--corpus", "c", "--kind", "document_set", "--docs", "note1,note2"});
  REQUIRE(r.code == kExitOk);
  const auto second = r.out.substr(9, r.out.size() - 10);
  REQUIRE(ws.run({"instances", "set", "--corpus", "c", "--name", "train", "--members", first + "," + second}).code ==
          kExitOk);
  REQUIRE(ws.run({"instances", "label", "--instance", first, "--task", "subtype", "--label", "ALCL"}).code ==
          kExitOk);
  r = ws.run({"instances", "show", "--corpus", "c", "--set", "train", "--task", "subtype"});
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].find("\tdocument\t") != std::string::npos);
  CHECK(rows[0].substr(rows[0].size() - 5) == "\tALCL");
  CHECK(rows[1].find("\tdocument_set\t") != std::string::npos);

  CHECK(ws.run({"instances", "create", "--corpus", "nope", "--kind", "document", "--ids", "1"}).code ==
        kExitInvalidInput);
  CHECK(ws.run({"instances", "label", "--instance", "999", "--task", "t", "--label", "x"}).code ==
        kExitInvalidInput);
  CHECK(ws.run({"instances"}).code == kExitUsage);
}
