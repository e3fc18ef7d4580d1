#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/annotation.hpp"

namespace standoff {

class Document;

struct TextToken {
  Interval span;
  std::string text;
  bool punctuation = false;
};

// Tokens are maximal runs of word characters, or single punctuation
// characters. Whitespace separates and is never part of a token.
std::vector<TextToken> tokenize_text(std::string_view text);

// True for tokens made only of non-word, non-space characters.
bool is_punctuation_token(std::string_view token);

struct SentenceSplitterOptions {
  // A period ending one of these words never ends a sentence.
  std::set<std::string> abbreviations = {"Dr.", "Mr.", "Mrs.", "Ms.", "vs.", "e.g.", "i.e."};
  // Consecutive newlines (possibly with blanks between) that end a sentence.
  std::size_t newline_run = 2;
};

// One abbreviation per line; blank lines and '#' comments are skipped.
std::set<std::string> load_abbreviations(const std::filesystem::path& path);

// Sentence spans over raw text. A sentence ends at . ? or ! followed by
// whitespace and an upper-case letter (unless the word is a listed
// abbreviation), at a newline run, or at end of text. Spans are trimmed of
// surrounding whitespace.
std::vector<Interval> sentence_spans(std::string_view text,
                                     const SentenceSplitterOptions& options = {});

// Annotation-producing forms. Nothing is added to the document; callers
// decide when to insert.
std::vector<Annotation> tokenize(const Document& doc);
std::vector<Annotation> split_sentences(const Document& doc,
                                        const SentenceSplitterOptions& options = {});

}  // namespace standoff
