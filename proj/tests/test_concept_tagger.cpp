#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <sstream>

#include "standoff/concept_tagger.hpp"
#include "standoff/errors.hpp"
#include "standoff/text_segmentation.hpp"
#include "support/tagger_oracle.hpp"

using namespace standoff;
using standoff::testing::lower;
using standoff::testing::oracle;
using standoff::testing::ToyLexicon;

namespace {

std::vector<SentenceToken> toks(const std::vector<std::string>& words) {
  std::vector<SentenceToken> out;
  Offset pos = 0;
  for (const auto& w : words) {
    out.push_back({Interval(pos, pos + w.size()), w});
    pos += w.size() + 1;
  }
  return out;
}

using Range = std::pair<std::size_t, std::size_t>;

std::vector<Range> ranges(const std::vector<ConceptMatch>& ms) {
  std::vector<Range> out;
  for (const auto& m : ms) out.emplace_back(m.token_start, m.token_end);
  return out;
}

}  // namespace

TEST_CASE("worked examples: congenital defect of the heart") {
  const auto sentence = toks({"congenital", "defect", "of", "the", "heart"});
  Lexicon lex;
  lex.add_term("congenital defect", "C0");
  lex.add_term("heart", "C1");
  lex.add_term("congenital", "C2");
  auto m = tag_sentence(sentence, lex);
  CHECK(ranges(m) == std::vector<Range>{{0, 2}, {4, 5}});
  CHECK(m[0].cuis == std::vector<std::string>{"C0"});
  CHECK(m[1].cuis == std::vector<std::string>{"C1"});
  CHECK(m[0].span == Interval(0, 17));

  lex.add_term("defect of the heart", "C3");
  auto m2 = tag_sentence(sentence, lex);
  CHECK(ranges(m2) == std::vector<Range>{{0, 2}, {1, 5}});
  CHECK(m2[1].cuis == std::vector<std::string>{"C3"});

  Lexicon fw;
  fw.add_term("the", "C9");
  fw.add_function_word("the");
  CHECK(tag_sentence(toks({"the", "heart"}), fw).empty());
  CHECK(tag_sentence({}, lex).empty());
}

TEST_CASE("case folding, punctuation and the phrase cap") {
  Lexicon lex;
  lex.add_term("Heart Attack", "C5");
  CHECK(lex.lookup(std::vector<std::string>{"heart", "attack"}) != nullptr);
  CHECK(ranges(tag_sentence(toks({"HEART", "attack"}), lex)) == std::vector<Range>{{0, 2}});
  CHECK(tag_sentence(toks({"heart", ",", "attack"}), lex).empty());
  lex.max_phrase_tokens = 1;
  CHECK(tag_sentence(toks({"heart", "attack"}), lex).empty());
}

TEST_CASE("tag_sentence matches the brute-force oracle") {
  std::mt19937 rng(2024);
  const std::vector<std::string> vocab{"heart", "Defect", "of", "the", "valve", "cold", ",", "."};
  for (int trial = 0; trial < 300; ++trial) {
    Lexicon lex;
    ToyLexicon toy;
    const int nterms = 1 + static_cast<int>(rng() % 8);
    for (int t = 0; t < nterms; ++t) {
      std::vector<std::string> key;
      std::string term;
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < len; ++k) {
        std::string w = vocab[rng() % 6];
        key.push_back(lower(w));
        term += (k ? " " : "") + (rng() % 2 ? w : lower(w));
      }
      const std::string cui = "C" + std::to_string(rng() % 5);
      lex.add_term(term, cui);
      auto& v = toy.terms[key];
      if (std::find(v.begin(), v.end(), cui) == v.end()) v.push_back(cui);
    }
    if (rng() % 2) {
      lex.add_function_word("the");
      lex.add_function_word("OF");
      toy.function_words = {"the", "of"};
    }
    std::vector<std::string> words;
    const std::size_t n = rng() % 13;
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);

    const auto got = tag_sentence(toks(words), lex);
    const auto want = oracle(words, toy);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(Range(got[i].token_start, got[i].token_end) == want[i].first);
      CHECK(got[i].cuis == want[i].second);
    }
    for (const auto& a : got) {
      for (const auto& b : got) {
        if (&a != &b) CHECK_FALSE((b.token_start <= a.token_start && a.token_end <= b.token_end));
      }
    }
  }
}

TEST_CASE("lexicon files") {
  Lexicon lex;
  std::istringstream terms("# comment\nHeart Attack\tC0027051\tMyocardial infarction\nheart attack\tC0027051\n"
                           "cold\tC0009443\ncold\tC0234192\n");
  read_terms(terms, lex);
  CHECK(lex.term_count() == 2);
  CHECK(lex.lookup(std::vector<std::string>{"cold"})->size() == 2);
  CHECK(*lex.preferred_term("C0027051") == "Myocardial infarction");

  std::istringstream bad("heart\tC1\nno tab here\n");
  try {
    Lexicon l2;
    read_terms(bad, l2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream pos("cold\tnoun,adjective\n");
  read_pos_map(pos, lex);
  CHECK(lex.pos_tags("COLD") == std::vector<std::string>{"noun", "adjective"});
  std::istringstream bad_tui("C1 T047\n");
  CHECK_THROWS_AS(read_tui_map(bad_tui, lex), ParseError);
}

TEST_CASE("document annotation: CUI, TUI and SP-POS") {
  Document doc("d", "The patient has a cold. Heart attack ruled out.");
  for (auto& a : tokenize(doc)) doc.add_annotation(std::move(a));
  for (auto& a : split_sentences(doc)) doc.add_annotation(std::move(a));

  Lexicon lex;
  lex.add_term("cold", "C0009443", "Common cold");
  lex.add_term("cold", "C0234192");
  lex.add_term("heart attack", "C0027051");
  lex.add_tui("C0009443", "T047");
  lex.add_tui("C0027051", "T047");
  lex.add_tui("C0027051", "T046");
  lex.add_pos("cold", "noun");
  lex.add_pos("cold", "adjective");

  auto serial = doc;
  auto ids = annotate_all_concepts(doc, lex, true);
  auto ids_serial = annotate_all_concepts(serial, lex, false);
  REQUIRE(ids.size() == 3);
  CHECK(ids_serial.size() == 3);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(doc.get(ids[i]) == serial.get(ids_serial[i]));

  const Annotation& c1 = doc.get(ids[0]);
  const Annotation& c2 = doc.get(ids[1]);
  CHECK(c1.span == c2.span);
  CHECK(doc.text(c1.span) == "cold");
  CHECK(c1.attributes.at("preferred") == "Common cold");
  CHECK(c1.attributes.at("token_start") == "4");
  CHECK(c2.attributes.count("preferred") == 0);
  CHECK(doc.text(doc.get(ids[2]).span) == "Heart attack");
  CHECK(doc.get(ids[2]).attributes.at("token_start") == "0");

  auto tuis = annotate_tuis(doc, lex);
  CHECK(tuis.size() == 3);  // 1 for C0009443, 0 for C0234192, 2 for C0027051
  for (auto id : tuis) CHECK(doc.get(id).span.length() > 0);

  auto pos = annotate_sp_pos(doc, lex);
  REQUIRE(pos.size() == 1);
  CHECK(doc.get(pos[0]).value == "noun,adjective");
  CHECK(doc.text(doc.get(pos[0]).span) == "cold");
}

TEST_CASE("upper-casing the text changes no match") {
  Lexicon lex;
  lex.add_term("heart attack", "C1");
  lex.add_term("cold", "C2");
  const std::string text = "heart attack and a cold";
  std::string upper = text;
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  Document a("a", text), b("b", upper);
  for (auto* d : {&a, &b}) {
    for (auto& t : tokenize(*d)) d->add_annotation(std::move(t));
  }
  auto ia = annotate_all_concepts(a, lex);
  auto ib = annotate_all_concepts(b, lex);
  REQUIRE(ia.size() == ib.size());
  for (std::size_t i = 0; i < ia.size(); ++i) CHECK(a.get(ia[i]).span == b.get(ib[i]).span);
}
