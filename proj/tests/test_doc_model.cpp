#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "standoff/document.hpp"
#include "standoff/errors.hpp"
#include "standoff/external_format.hpp"
#include "standoff/segments.hpp"
#include "standoff/text_segmentation.hpp"
#include "support/oracles.hpp"

using namespace standoff;
using standoff::testing::random_interval;
using standoff::testing::reference_holds;

namespace {

Annotation make(Interval span, std::string type, std::string value = {}) {
  Annotation a;
  a.span = span;
  a.type = std::move(type);
  a.value = std::move(value);
  return a;
}

std::vector<Interval> spans_of(const std::vector<const Annotation*>& anns) {
  std::vector<Interval> out;
  for (const auto* a : anns) out.push_back(a->span);
  return out;
}

std::vector<Interval> spans_of(const std::vector<Annotation>& anns) {
  std::vector<Interval> out;
  for (const auto& a : anns) out.push_back(a.span);
  return out;
}

// Brute force over every annotation in the document.
std::vector<AnnotationId> brute_force(const Document& doc, const std::vector<AnnotationId>& ids,
                                      AllenRelation rel, const Interval& b,
                                      std::optional<std::string> type) {
  std::vector<std::pair<Interval, AnnotationId>> hits;
  for (AnnotationId id : ids) {
    const Annotation& a = doc.get(id);
    if (type && a.type != *type) continue;
    if (reference_holds(rel, a.span, b)) hits.emplace_back(a.span, id);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<AnnotationId> out;
  for (auto& h : hits) out.push_back(h.second);
  return out;
}

std::vector<AnnotationId> ids_of(const std::vector<const Annotation*>& anns) {
  std::vector<AnnotationId> out;
  for (const auto* a : anns) out.push_back(a->id);
  return out;
}

}  // namespace

TEST_CASE("add_annotation bounds and duplicate ids") {
  Document doc("d", "0123456789");
  AnnotationId id = doc.add_annotation(make({0, 3}, "token", "012"));
  CHECK(doc.get(id).span == Interval(0, 3));
  CHECK(doc.annotations_satisfying(AllenRelation::kEqual, {0, 3}).size() == 1);
  CHECK_THROWS_AS(doc.add_annotation(make({5, 20}, "token")), BoundsError);
  Annotation dup = make({1, 2}, "token");
  dup.id = id;
  CHECK_THROWS_AS(doc.add_annotation(dup), DuplicateError);
  CHECK(doc.dirty().count(id) == 1);
  CHECK(is_provisional(id));
}

TEST_CASE("document text slices by code points") {
  Document doc("u", "caf\xC3\xA9 au lait");
  CHECK(doc.length() == 12);
  CHECK(doc.text({0, 4}) == "caf\xC3\xA9");
  CHECK(doc.text({5, 7}) == "au");
  CHECK_THROWS_AS(doc.text({10, 13}), BoundsError);
}

TEST_CASE("index stays consistent with a rebuilt-from-list oracle") {
  std::mt19937_64 rng(5);
  const std::string content(400, 'x');
  Document doc("r", content);
  std::vector<AnnotationId> ids;
  const char* kinds[] = {"token", "CUI", "sentence"};
  for (int n = 0; n < 1000; ++n) {
    ids.push_back(doc.add_annotation(make(random_interval(rng, 400, 30), kinds[rng() % 3])));
  }
  REQUIRE_FALSE(doc.index().check_consistency().has_value());

  Document rebuilt("r", content);
  for (AnnotationId id : ids) {
    Annotation copy = doc.get(id);
    rebuilt.add_annotation(copy);
  }
  CHECK(ids_of(doc.index().all()) == ids_of(rebuilt.index().all()));

  for (int q = 0; q < 40; ++q) {
    Interval b = random_interval(rng, 400, 60);
    for (AllenRelation rel : kAllRelations) {
      CHECK(ids_of(doc.annotations_satisfying(rel, b)) == brute_force(doc, ids, rel, b, {}));
      CHECK(ids_of(doc.annotations_satisfying(rel, b, "CUI")) ==
            brute_force(doc, ids, rel, b, "CUI"));
    }
  }

  // Removals and updates keep the three structures aligned.
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = rng() % ids.size();
    if (n % 2 == 0) {
      doc.remove_annotation(ids[k]);
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      Annotation a = doc.get(ids[k]);
      a.span = random_interval(rng, 400, 30);
      a.type = kinds[rng() % 3];
      doc.update_annotation(a);
    }
  }
  CHECK_FALSE(doc.index().check_consistency().has_value());
}

TEST_CASE("annotations_satisfying worked examples") {
  Document doc("t", "abc def ghi");
  doc.add_annotation(make({0, 3}, "token"));
  doc.add_annotation(make({4, 7}, "token"));
  doc.add_annotation(make({8, 11}, "token"));
  CHECK(spans_of(doc.annotations_satisfying(AllenRelation::kAfter, {0, 3})) ==
        std::vector<Interval>{{4, 7}, {8, 11}});
  CHECK(doc.annotations_satisfying(AllenRelation::kAfter, {0, 3}, "CUI").empty());
  // Only the middle token is strictly inside (0,11); the others share an end.
  CHECK(spans_of(doc.annotations_satisfying(AllenRelation::kDuring, {0, 11})) ==
        std::vector<Interval>{{4, 7}});
}

TEST_CASE("next_annotations") {
  Document doc("t", "abc def ghi");
  AnnotationId a = doc.add_annotation(make({0, 3}, "token"));
  doc.add_annotation(make({4, 7}, "token"));
  AnnotationId last = doc.add_annotation(make({8, 11}, "token"));
  doc.add_annotation(make({0, 11}, "sentence"));
  CHECK(spans_of(doc.next_annotations(doc.get(a), 2, "token")) ==
        std::vector<Interval>{{4, 7}, {8, 11}});
  CHECK(doc.next_annotations(doc.get(last), 2, "token").empty());

  Document adj("adj", "abcdefg");
  AnnotationId anchor = adj.add_annotation(make({0, 3}, "token"));
  adj.add_annotation(make({3, 7}, "token"));
  CHECK(spans_of(adj.next_annotations(adj.get(anchor), 1, "token")) ==
        std::vector<Interval>{{3, 7}});
}

TEST_CASE("next_annotations(k) is a prefix of next_annotations(k+1)") {
  std::mt19937_64 rng(11);
  Document doc("p", std::string(200, 'y'));
  std::vector<AnnotationId> ids;
  for (int n = 0; n < 150; ++n) {
    ids.push_back(doc.add_annotation(make(random_interval(rng, 200, 10), n % 2 ? "token" : "CUI")));
  }
  for (int t = 0; t < 30; ++t) {
    const Annotation& anchor = doc.get(ids[rng() % ids.size()]);
    for (std::size_t k = 1; k < 12; ++k) {
      auto shorter = ids_of(doc.next_annotations(anchor, k, "token"));
      auto longer = ids_of(doc.next_annotations(anchor, k + 1, "token"));
      REQUIRE(shorter.size() <= longer.size());
      CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
      for (AnnotationId id : longer) CHECK(doc.get(id).span.start() >= anchor.span.end());
    }
  }
}

TEST_CASE("segment_context worked example and errors") {
  // "aspirin reduces pain now"
  auto seg = segment_context(Interval(0, 7), Interval(16, 20), Interval(0, 24));
  CHECK(seg.preceding == Interval(0, 0));
  CHECK(seg.between == Interval(7, 16));
  CHECK(seg.succeeding == Interval(20, 24));
  CHECK_THROWS_AS(segment_context(Interval(0, 7), Interval(5, 9), Interval(0, 24)), OverlapError);
  CHECK_THROWS_AS(segment_context(Interval(10, 12), Interval(0, 3), Interval(0, 24)), OrderError);
  CHECK_THROWS_AS(segment_context(Interval(0, 7), Interval(20, 30), Interval(0, 24)), BoundsError);
  Annotation c = make({0, 7}, "CUI");
  c.id = 4;
  Annotation s = make({0, 24}, "sentence");
  CHECK_THROWS_AS(segment_context(c, c, s), OverlapError);
}

TEST_CASE("segment partition over random configurations") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    Offset s0 = rng() % 50, len = rng() % 60;
    Interval sentence(s0, s0 + len);
    std::vector<Offset> cuts = {s0 + rng() % (len + 1), s0 + rng() % (len + 1),
                                s0 + rng() % (len + 1), s0 + rng() % (len + 1)};
    std::sort(cuts.begin(), cuts.end());
    auto seg = segment_context(Interval(cuts[0], cuts[1]), Interval(cuts[2], cuts[3]), sentence);
    const Interval parts[] = {seg.preceding, seg.concept1, seg.between, seg.concept2,
                              seg.succeeding};
    Offset cursor = sentence.start();
    for (const auto& p : parts) {
      CHECK(p.start() == cursor);
      cursor = p.end();
    }
    CHECK(cursor == sentence.end());
  }
}

TEST_CASE("tokenizer and sentence splitter") {
  Document doc("a", "A b.");
  CHECK(spans_of(tokenize(doc)) == std::vector<Interval>{{0, 1}, {2, 3}, {3, 4}});
  CHECK(spans_of(split_sentences(doc)) == std::vector<Interval>{{0, 4}});

  Document empty("e", "");
  CHECK(tokenize(empty).empty());
  CHECK(split_sentences(empty).empty());

  Document dr("dr", "Dr. Smith came. He left.");
  CHECK(spans_of(split_sentences(dr)) == std::vector<Interval>{{0, 15}, {16, 24}});
  SentenceSplitterOptions no_abbrev;
  no_abbrev.abbreviations.clear();
  CHECK(split_sentences(dr, no_abbrev).size() == 3);

  Document lines("l", "History\n\nPlan: rest\nand fluids");
  CHECK(spans_of(split_sentences(lines)) == std::vector<Interval>{{0, 7}, {9, 30}});
}

TEST_CASE("tokens never cross sentence boundaries") {
  std::mt19937_64 rng(17);
  const std::string alphabet = "ab CD.,!?\n e.g.Dr";
  for (int t = 0; t < 300; ++t) {
    std::string text;
    const int len = static_cast<int>(rng() % 80);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    Document doc("x", text);
    const auto sentences = split_sentences(doc);
    for (const auto& tok : tokenize(doc)) {
      for (const auto& s : sentences) {
        const auto rels = relate(tok.span, s.span);
        CHECK_FALSE(rels.contains(AllenRelation::kOverlaps));
        CHECK_FALSE(rels.contains(AllenRelation::kOverlappedBy));
      }
    }
  }
}

TEST_CASE("external import: counts, errors, round trip") {
  Document doc("note1", "patient has a cold today");
  std::istringstream two(
      "note1\t0\t7\ttoken\tpatient\t\n"
      "note1\t14\t18\tCUI\tC0009443\tpreferred=Common Cold;token_start=3\n"
      "other\t0\t1\ttoken\tx\t\n");
  CHECK(import_external_annotations(doc, two) == 2);

  Document bad("note1", "patient has a cold today");
  std::istringstream broken("note1\t0\t7\ttoken\tpatient\t\nnote1\t9\t3\ttoken\tbad\t\n");
  try {
    import_external_annotations(bad, broken);
    FAIL("expected ImportError");
  } catch (const ImportError& e) {
    CHECK(e.lines() == std::vector<std::size_t>{2});
  }
  CHECK(bad.annotation_count() == 0);

  Annotation odd = make({0, 7}, "weird\ttype", "semi;colon=eq\\back\nline");
  odd.attributes["k;1"] = "v=1\t2";
  odd.attributes["plain"] = "";
  doc.add_annotation(odd);
  std::ostringstream out;
  export_annotations(doc, out);
  Document copy("note1", doc.content());
  std::istringstream in(out.str());
  CHECK(import_external_annotations(copy, in) == doc.annotation_count());
  auto a = doc.index().all();
  auto b = copy.index().all();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(to_external(doc, *a[i]) == to_external(copy, *b[i]));
  }
}

TEST_CASE("content is untouched by annotation workloads") {
  const std::string text = "stand-off annotations never edit the text";
  Document doc("s", text);
  for (auto& t : tokenize(doc)) doc.add_annotation(t);
  for (auto& s : split_sentences(doc)) doc.add_annotation(s);
  for (const auto* a : doc.index().all()) {
    Annotation c = *a;
    c.value = "changed";
    doc.update_annotation(c);
  }
  CHECK(doc.content() == text);
}
