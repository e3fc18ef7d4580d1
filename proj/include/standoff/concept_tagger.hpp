#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "standoff/document.hpp"

namespace standoff {

// Dictionary for the concept tagger. Terms are split with the tokenizer's
// rules, punctuation tokens are dropped and the rest case-folded, so a
// lookup is a sequence of folded word tokens.
class Lexicon {
 public:
  static constexpr std::size_t kDefaultMaxPhraseTokens = 12;

  // Returns false when the term has no word tokens. (term, CUI) pairs seen
  // before are ignored.
  bool add_term(std::string_view term, const std::string& cui, std::string_view preferred = {});
  void add_tui(const std::string& cui, const std::string& tui);
  void add_pos(std::string_view token, const std::string& tag);
  void add_function_word(std::string_view token);

  // CUIs for a sequence of already folded tokens, or nullptr.
  const std::vector<std::string>* lookup(std::span<const std::string> folded) const;
  const std::vector<std::string>& tuis(const std::string& cui) const;
  const std::vector<std::string>& pos_tags(std::string_view token) const;
  const std::string* preferred_term(const std::string& cui) const;
  bool is_function_word(std::string_view token) const;

  std::size_t term_count() const noexcept { return entries_.size(); }
  std::size_t max_phrase_tokens = kDefaultMaxPhraseTokens;

  static std::string join_key(std::span<const std::string> folded);

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::unordered_map<std::string, std::string> preferred_;
  std::unordered_map<std::string, std::vector<std::string>> cui_to_tui_;
  std::unordered_map<std::string, std::vector<std::string>> token_to_pos_;
  std::unordered_set<std::string> function_words_;
};

// File formats (UTF-8, tab separated, '#' starts a comment line):
//   terms:          term<TAB>CUI[<TAB>preferred term]
//   TUI map:        CUI<TAB>TUI
//   POS map:        token<TAB>tag[,tag...]
//   function words: one token per line
// A malformed line raises ParseError carrying its line number.
void read_terms(std::istream& in, Lexicon& lex);
void read_tui_map(std::istream& in, Lexicon& lex);
void read_pos_map(std::istream& in, Lexicon& lex);
void read_function_words(std::istream& in, Lexicon& lex);

struct LexiconFiles {
  std::filesystem::path terms;
  std::optional<std::filesystem::path> tui_map;
  std::optional<std::filesystem::path> pos_map;
  std::optional<std::filesystem::path> function_words;
  std::size_t max_phrase_tokens = Lexicon::kDefaultMaxPhraseTokens;
};

Lexicon load_lexicon(const LexiconFiles& files);

struct SentenceToken {
  Interval span;
  std::string text;
};

struct ConceptMatch {
  std::size_t token_start = 0;  // half-open token range within the sentence
  std::size_t token_end = 0;
  Interval span;
  std::vector<std::string> cuis;

  friend bool operator==(const ConceptMatch&, const ConceptMatch&) = default;
};

// Looks up every contiguous run of up to max_phrase_tokens tokens that has
// no punctuation token in it. Matches whose token range lies inside a
// longer match are dropped (longest first, then leftmost), then single
// token matches on function words. Partially overlapping matches are all
// kept. Output is ordered by token range.
std::vector<ConceptMatch> tag_sentence(std::span<const SentenceToken> tokens, const Lexicon& lex);

// Tags many sentences at once: an OpenMP version and the plain loop it is
// checked against.
std::vector<std::vector<ConceptMatch>> tag_sentences(
    std::span<const std::vector<SentenceToken>> sentences, const Lexicon& lex);
std::vector<std::vector<ConceptMatch>> tag_sentences_serial(
    std::span<const std::vector<SentenceToken>> sentences, const Lexicon& lex);

inline constexpr const char* kConceptProvenance = "concept_tagger";
inline constexpr const char* kTuiProvenance = "tui_mapper";
inline constexpr const char* kSpPosProvenance = "sp_pos_mapper";

// Tokens of the document lying inside the span, in order.
std::vector<SentenceToken> tokens_within(const Document& doc, const Interval& span);

// One CUI annotation per (match, CUI) with attributes token_start and
// token_end (sentence relative) and preferred when the lexicon has it.
std::vector<AnnotationId> annotate_concepts(Document& doc, const Annotation& sentence,
                                            const Lexicon& lex);

// Every sentence of the document (or the whole text when it has none).
// `parallel` picks the OpenMP tagging kernel; the result is the same.
std::vector<AnnotationId> annotate_all_concepts(Document& doc, const Lexicon& lex,
                                                bool parallel = true);

// One TUI annotation per mapped TUI of each CUI annotation, same span.
std::vector<AnnotationId> annotate_tuis(Document& doc, const Lexicon& lex);

// One SP-POS annotation per token that has POS tags; value is the tags
// joined with commas.
std::vector<AnnotationId> annotate_sp_pos(Document& doc, const Lexicon& lex);

}  // namespace standoff
