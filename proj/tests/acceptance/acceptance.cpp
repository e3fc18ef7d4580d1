// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "standoff/cdm_store.hpp"
#include "standoff/concept_tagger.hpp"
#include "standoff/document.hpp"
#include "standoff/errors.hpp"
#include "standoff/graph_tools.hpp"
#include "standoff/inline_converter.hpp"
#include "standoff/interval_tree.hpp"
#include "standoff/section_detector.hpp"
#include "standoff/segments.hpp"
#include "support/graph_oracles.hpp"
#include "support/oracles.hpp"
#include "support/tagger_oracle.hpp"

using namespace standoff;
using namespace standoff::testing;

namespace {

// Collects failed checks; the first few are reported.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ += ok ? 0 : 1;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    if (ok()) return std::to_string(total_) + " checks";
    std::string s = std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed";
    for (const auto& f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

std::string str(const Interval& i) { return "(" + std::to_string(i.start()) + "," + std::to_string(i.end()) + ")"; }

// 1 -----------------------------------------------------------------------
void phi_sentence(Check& check) {
  std::ifstream in(STANDOFF_ACCEPTANCE_DATA_DIR "/phi_sentence.xml", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  check(!ss.str().empty(), "fixture readable");
  const auto r = convert_inline(ss.str());
  const auto rows = render_offsets(r.annotations, OffsetConvention::kInclusive1);
  const std::vector<OffsetRow> want{{48, 83, "PHI", "Type=Hospital"}, {88, 95, "PHI", "Type=Date"}};
  check(rows == want, "inclusive-1 rows");
  const std::string name = "Beth Israel Deaconess Medical Center";
  check(r.text.find(name) == 47 && name.size() == 36, "plain text holds the name at 47");
  check(!r.annotations.empty() && r.annotations[0].span == Interval(47, 83), "canonical span (47,83)");
}

// 2 -----------------------------------------------------------------------
void relation_oracle(Check& check) {
  std::mt19937_64 rng(11);
  for (int doc = 0; doc < 50; ++doc) {
    IntervalTree tree;
    std::vector<TreeEntry> all;
    for (EntryId id = 1; id <= 200; ++id) {
      const auto iv = random_interval(rng, 500, 60);
      tree.insert(iv, id);
      all.push_back({iv, id});
    }
    std::sort(all.begin(), all.end());
    for (int q = 0; q < 50; ++q) {
      const auto b = random_interval(rng, 500, 80);
      for (auto rel : kAllRelations) {
        check(tree.query(rel, b) == linear_scan(all, rel, b),
              "doc " + std::to_string(doc) + " " + std::string(relation_name(rel)) + " " + str(b));
      }
    }
  }
}

// 3 -----------------------------------------------------------------------
void null_interval(Check& check) {
  for (Offset x = 0; x < 50; ++x) {
    for (Offset len = 1; len < 10; ++len) {
      const Interval i(x, x), j(x, x + len);
      const auto set = relate(i, j);
      check(set.contains(AllenRelation::kMeets) && set.contains(AllenRelation::kStarts), "relate" + str(i) + str(j));
      for (auto rel : kAllRelations) {
        check(set.contains(rel) == reference_holds(rel, i, j), "relation set agrees with the table");
      }
    }
  }
}

// 4 -----------------------------------------------------------------------
void tree_audit(Check& check) {
  std::mt19937_64 rng(4);
  IntervalTree tree;
  std::set<TreeEntry> live;
  EntryId next = 1;
  for (int op = 0; op < 10000; ++op) {
    if (live.empty() || rng() % 5 < 3) {
      const auto iv = random_interval(rng, 300, 40);
      // repeated intervals exercise nodes holding several payloads
      tree.insert(iv, next);
      live.insert({iv, next++});
    } else {
      auto it = live.begin();
      std::advance(it, rng() % live.size());
      tree.remove(it->interval, it->id);
      live.erase(it);
    }
    if (op % 500 == 0) {
      const auto problem = tree.audit();
      check(!problem, "audit at op " + std::to_string(op) + ": " + problem.value_or(""));
    }
  }
  const auto problem = tree.audit();
  check(!problem, "final audit: " + problem.value_or(""));
  IntervalTree rebuilt;
  for (const auto& e : live) rebuilt.insert(e.interval, e.id);
  check(tree.entries() == rebuilt.entries(), "content equals the rebuild");
  check(tree.entries() == std::vector<TreeEntry>(live.begin(), live.end()), "content equals the surviving set");
  check(tree.size() == live.size(), "size");
}

// 5 -----------------------------------------------------------------------
void pruning(Check& check) {
  std::mt19937_64 rng(5);
  constexpr Offset kSpan = 1000000;
  IntervalTree tree;
  std::vector<TreeEntry> all;
  for (EntryId id = 1; id <= 100000; ++id) {
    const auto iv = random_interval(rng, kSpan, 1000);
    tree.insert(iv, id);
    all.push_back({iv, id});
  }
  std::sort(all.begin(), all.end());
  const std::pair<AllenRelation, Interval> cases[] = {{AllenRelation::kBefore, Interval(100, 200)},
                                                       {AllenRelation::kAfter, Interval(kSpan - 200, kSpan - 100)}};
  for (const auto& [rel, b] : cases) {
    QueryStats stats;
    const auto got = tree.query(rel, b, &stats);
    check(got == linear_scan(all, rel, b), std::string(relation_name(rel)) + " matches the scan");
    const double share = static_cast<double>(stats.visited) / static_cast<double>(tree.node_count());
    check(share < 0.10, std::string(relation_name(rel)) + " visited " + std::to_string(stats.visited) + " of " +
                            std::to_string(tree.node_count()) + " nodes");
  }
}

// 6 -----------------------------------------------------------------------
std::vector<SentenceToken> sentence_tokens(const std::vector<std::string>& words) {
  std::vector<SentenceToken> out;
  Offset pos = 0;
  for (const auto& w : words) {
    out.push_back({Interval(pos, pos + w.size()), w});
    pos += w.size() + 1;
  }
  return out;
}

std::vector<Range> match_ranges(const std::vector<ConceptMatch>& ms) {
  std::vector<Range> out;
  for (const auto& m : ms) out.emplace_back(m.token_start, m.token_end);
  return out;
}

void tagger_oracle(Check& check) {
  const auto heart = sentence_tokens({"congenital", "defect", "of", "the", "heart"});
  Lexicon lex;
  lex.add_term("congenital defect", "C0");
  lex.add_term("heart", "C1");
  lex.add_term("congenital", "C2");
  const auto first = tag_sentence(heart, lex);
  check(match_ranges(first) == std::vector<Range>{{0, 2}, {4, 5}}, "first worked example spans");
  check(first.size() == 2 && first[0].cuis == std::vector<std::string>{"C0"} &&
            first[1].cuis == std::vector<std::string>{"C1"},
        "first worked example CUIs");
  lex.add_term("defect of the heart", "C3");
  const auto second = tag_sentence(heart, lex);
  check(match_ranges(second) == std::vector<Range>{{0, 2}, {1, 5}}, "second worked example spans");
  check(second.size() == 2 && second[1].cuis == std::vector<std::string>{"C3"}, "second worked example CUIs");

  std::mt19937 rng(6);
  const std::vector<std::string> vocab{"heart", "Defect", "of", "the", "valve", "cold", ",", "."};
  for (int trial = 0; trial < 100; ++trial) {
    Lexicon l;
    ToyLexicon toy;
    const int nterms = 1 + static_cast<int>(rng() % 8);
    for (int t = 0; t < nterms; ++t) {
      std::vector<std::string> key;
      std::string term;
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < len; ++k) {
        const std::string w = vocab[rng() % 6];
        key.push_back(lower(w));
        term += (k ? " " : "") + w;
      }
      const std::string cui = "C" + std::to_string(rng() % 5);
      l.add_term(term, cui);
      auto& v = toy.terms[key];
      if (std::find(v.begin(), v.end(), cui) == v.end()) v.push_back(cui);
    }
    if (rng() % 2) {
      l.add_function_word("the");
      l.add_function_word("of");
      toy.function_words = {"the", "of"};
    }
    std::vector<std::string> words;
    const std::size_t n = rng() % 13;
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);
    const auto got = tag_sentence(sentence_tokens(words), l);
    const auto want = oracle(words, toy);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = Range(got[i].token_start, got[i].token_end) == want[i].first && got[i].cuis == want[i].second;
    }
    check(same, "random case " + std::to_string(trial));
  }
}

// 7 -----------------------------------------------------------------------
void persistence(Check& check) {
  std::mt19937_64 rng(7);
  std::string text;
  for (int i = 0; i < 2500; ++i) text += static_cast<char>('a' + rng() % 26);
  Document doc("round-trip", text, {{"source", "generated"}});
  const char* type_names[] = {"token", "sentence", "CUI", "PHI"};
  for (int i = 0; i < 1000; ++i) {
    Annotation a;
    a.span = random_interval(rng, 2500, 50);
    a.type = type_names[rng() % 4];
    a.value = "v" + std::to_string(rng() % 97);
    if (rng() % 3 == 0) a.attributes["k"] = "x=1;y\t" + std::to_string(i);
    a.provenance = "acceptance";
    doc.add_annotation(std::move(a));
  }
  auto store = CdmStore::open("sqlite::memory:");
  store.init_schema();
  store.marshal_document(doc);
  const auto loaded = store.unmarshal_document(doc.id());

  check(loaded.annotation_count() == 1000, "annotation count");
  check(loaded.content() == doc.content() && loaded.name() == doc.name(), "text and name");
  check(loaded.metadata() == doc.metadata(), "metadata");
  for (const auto* a : doc.index().all()) {
    const auto* b = loaded.find(a->id);
    check(b != nullptr && *a == *b, "annotation " + std::to_string(a->id) + " field-identical");
  }
  for (int q = 0; q < 40; ++q) {
    const auto b = random_interval(rng, 2500, 100);
    for (auto rel : kAllRelations) {
      std::vector<Annotation> before, after;
      for (const auto* a : doc.annotations_satisfying(rel, b)) before.push_back(*a);
      for (const auto* a : loaded.annotations_satisfying(rel, b)) after.push_back(*a);
      check(before == after, std::string(relation_name(rel)) + " " + str(b) + " agrees after reload");
    }
  }

  auto working = store.unmarshal_document(doc.id());
  const auto all = working.index().all();
  std::vector<AnnotationId> ids;
  for (const auto* a : all) ids.push_back(a->id);
  for (std::size_t k : {0, 1, 17, 250}) {
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < k; ++i) {
      Annotation changed = working.get(ids[i]);
      changed.value += "*";
      working.update_annotation(changed);
    }
    const auto written = store.checkpoint(working);
    check(written == k, "checkpoint after " + std::to_string(k) + " edits wrote " + std::to_string(written));
  }
  const auto reread = store.unmarshal_document(doc.id());
  for (const auto* a : working.index().all()) {
    const auto* b = reread.find(a->id);
    check(b != nullptr && *a == *b, "edited annotation persisted");
  }
  check(store.row_count("annotations") == 1000, "no extra rows");
}

// 8 -----------------------------------------------------------------------
std::vector<const Annotation*> resolve(const Document& doc, const std::vector<AnnotationId>& ids) {
  std::vector<const Annotation*> out;
  for (auto id : ids) out.push_back(&doc.get(id));
  return out;
}

void check_children(Check& check, const Document& doc, const std::vector<const Annotation*>& sections) {
  for (const auto* s : sections) {
    const auto it = s->attributes.find(kParentAttribute);
    if (it == s->attributes.end()) continue;
    const auto& parent = doc.get(std::stoll(it->second));
    const auto rels = relate(s->span, parent.span);
    check(rels.contains(AllenRelation::kDuring) || rels.contains(AllenRelation::kStarts) ||
              rels.contains(AllenRelation::kFinishes),
          s->value + " lies inside " + parent.value);
  }
}

void sections(Check& check) {
  const auto flat = parse_guideline(R"X(<guideline name="flat">
  <section name="history"><pattern regex="^PAST MEDICAL HISTORY:"/></section>
  <section name="medications"><pattern regex="^MEDICATIONS:"/></section>
</guideline>)X");
  Document a("flat", "PAST MEDICAL HISTORY: diabetes.\nMEDICATIONS: aspirin.\n");
  const auto fs = resolve(a, detect_sections(a, flat));
  check(fs.size() == 2 && fs[0]->span == Interval(0, 32) && fs[1]->span == Interval(32, 54), "flat layout");

  const auto nested = parse_guideline(R"X(<guideline name="nested">
  <section name="results">
    <pattern regex="^RESULTS:"/>
    <section name="labs"><pattern regex="^Labs:"/></section>
    <section name="imaging"><pattern regex="^Imaging:"/></section>
  </section>
  <section name="plan"><pattern regex="^PLAN:"/></section>
</guideline>)X");
  Document b("nested", "RESULTS:\nLabs: WBC 7.2\nImaging: clear\nPLAN:\nrest and fluids\n");
  const auto ns = resolve(b, detect_sections(b, nested));
  check(ns.size() == 4, "nested layout has four sections");
  if (ns.size() == 4) {
    check(ns[0]->value == "results" && ns[0]->span == Interval(0, 38), "results (0,38)");
    check(ns[1]->value == "labs" && ns[1]->span == Interval(9, 23), "labs (9,23)");
    check(ns[2]->value == "imaging" && ns[2]->span == Interval(23, 38), "imaging (23,38)");
    check(ns[3]->value == "plan" && ns[3]->span == Interval(38, 60), "plan (38,60)");
  }
  check_children(check, b, ns);

  const auto with_template = parse_guideline(R"X(<guideline name="lab">
  <section name="labs"><pattern regex="^LABS:"/></section>
  <section name="plan"><pattern regex="^PLAN:"/></section>
  <template name="differential">
    <pattern>Differential:\s*(?&lt;polys&gt;\d+)\s*% polys,\s*(?&lt;bands&gt;\d+)\s*% bands,\s*(?&lt;lymphs&gt;\d+)\s*% lymphs</pattern>
    <attribute name="polys" group="polys"/>
    <attribute name="bands" group="bands"/>
    <attribute name="lymphs" group="lymphs"/>
  </template>
</guideline>)X");
  Document c("template", "LABS:\nDifferential: 70 % polys, 5 % bands, 20 % lymphs.\nPLAN: recheck\n");
  const auto cs = resolve(c, detect_sections(c, with_template));
  check(cs.size() == 2 && cs[0]->span == Interval(0, 56) && cs[1]->span == Interval(56, 70), "sections around a template");
  const auto ts = resolve(c, match_templates(c, with_template));
  check(ts.size() == 1, "one template match");
  if (ts.size() == 1) {
    check(ts[0]->span == Interval(6, 54), "template span (6,54), got " + str(ts[0]->span));
    check(ts[0]->attributes.count("polys") && ts[0]->attributes.at("polys") == "70", "polys");
    check(ts[0]->attributes.count("bands") && ts[0]->attributes.at("bands") == "5", "bands");
    check(ts[0]->attributes.count("lymphs") && ts[0]->attributes.at("lymphs") == "20", "lymphs");
    check(!cs.empty() && holds(AllenRelation::kDuring, ts[0]->span, cs[0]->span), "template inside its section");
  }
}

// 9 -----------------------------------------------------------------------
void mining(Check& check) {
  std::mt19937 rng(9);
  const std::vector<std::string> labels{"a", "b", "c"};
  std::vector<LabeledGraph> graphs;
  for (int i = 0; i < 20; ++i) graphs.push_back(random_graph(rng, 6, 7, labels));
  for (std::size_t support : {1, 2}) {
    for (std::size_t max_nodes : {1, 2, 3}) {
      const auto tag = " (support " + std::to_string(support) + ", max_nodes " + std::to_string(max_nodes) + ")";
      const auto mined = mine_frequent_subgraphs(graphs, {support, max_nodes, true});
      std::size_t expected = 0;
      for (const auto& c : oracle_patterns(graphs, max_nodes)) {
        if (c.graphs.size() < support) continue;
        ++expected;
        const auto hit = std::find_if(mined.begin(), mined.end(),
                                      [&](const MinedPattern& p) { return brute_isomorphic(p.pattern, c.pattern); });
        check(hit != mined.end(), "oracle pattern missing" + tag);
        if (hit != mined.end()) {
          check(std::set<std::size_t>(hit->members.begin(), hit->members.end()) == c.graphs, "support set" + tag);
        }
      }
      check(mined.size() == expected, "pattern count" + tag);
      for (const auto& p : mined) {
        for (const auto& q : mined) {
          if (&p == &q || p.pattern.nodes.size() > q.pattern.nodes.size()) continue;
          if (!find_subgraph_occurrences(q.pattern, p.pattern).empty()) {
            check(p.support >= q.support, "anti-monotone" + tag);
          }
        }
      }
    }
  }
}

// 10 ----------------------------------------------------------------------
template <class E>
bool raises(const std::function<void()>& f) {
  try {
    f();
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

void segments(Check& check) {
  std::mt19937_64 rng(10);
  const auto pick = [&](Offset lo, Offset hi) { return lo + static_cast<Offset>(rng() % (hi - lo + 1)); };
  for (int trial = 0; trial < 500; ++trial) {
    const Offset s = pick(0, 100), e = s + pick(2, 80);
    // four cut points inside the sentence: s <= a <= b <= c <= d <= e
    std::vector<Offset> cuts{pick(s, e), pick(s, e), pick(s, e), pick(s, e)};
    std::sort(cuts.begin(), cuts.end());
    // empty and adjacent concepts included
    const Interval sentence(s, e), c1(cuts[0], cuts[1]), c2(cuts[2], cuts[3]);
    const auto seg = segment_context(c1, c2, sentence);
    const Interval parts[] = {seg.preceding, seg.concept1, seg.between, seg.concept2, seg.succeeding};
    bool tiles = parts[0].start() == s && parts[4].end() == e;
    for (int k = 1; k < 5; ++k) tiles = tiles && parts[k - 1].end() == parts[k].start();
    check(tiles, "partition of " + str(sentence) + " by " + str(c1) + str(c2));
    check(seg.concept1 == c1 && seg.concept2 == c2, "concept spans kept");

    const Offset len = e - s;
    if (len >= 4) {
      const Interval a(s + 1, s + 2), b(s + 3, s + 4);
      check(raises<OrderError>([&] { segment_context(b, a, sentence); }), "reversed pair raises OrderError");
      check(raises<OverlapError>([&] { segment_context(Interval(s, s + 3), Interval(s + 1, s + 4), sentence); }),
            "overlapping pair raises OverlapError");
      check(raises<BoundsError>([&] { segment_context(a, Interval(e - 1, e + 1), sentence); }),
            "concept past the end raises BoundsError");
    }
  }
}

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  void (*run)(Check&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "inline PHI sentence converts to the reference offset table", 1, phi_sentence},
      {2, "tree queries equal linear-scan filtering for all 13 relations", 30, relation_oracle},
      {3, "a null interval at another's start both meets and starts it", 1, null_interval},
      {4, "red-black and augmentation audit after 10000 random updates", 10, tree_audit},
      {5, "before/after queries at the extremes visit < 10% of nodes", 10, pruning},
      {6, "greedy tagger equals the brute-force oracle and worked examples", 5, tagger_oracle},
      {7, "store round trip is field-identical; checkpoint writes k rows", 30, persistence},
      {8, "section layouts, nesting relations and template groups", 5, sections},
      {9, "frequent subgraphs equal exhaustive enumeration; anti-monotone", 60, mining},
      {10, "segment_context partitions the sentence; invalid input raises", 5, segments},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.run(check);
    } catch (const std::exception& e) {
      error = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = error.empty() && check.ok() && in_time;
    failed += pass ? 0 : 1;
    std::ostringstream detail;
    detail.setf(std::ios::fixed);
    detail.precision(2);
    detail << check.summary() << ", " << secs << " s of " << c.budget_seconds << " s";
    if (!error.empty()) detail << ", " << error;
    if (!in_time) detail << ", over budget";
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " [" << detail.str()
              << "]" << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
