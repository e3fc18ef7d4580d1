#include "standoff/text_segmentation.hpp"

#include <fstream>

#include "standoff/document.hpp"
#include "standoff/errors.hpp"
#include "standoff/utf8.hpp"

namespace standoff {

namespace {

bool is_terminator(char32_t cp) { return cp == '.' || cp == '?' || cp == '!'; }

std::string encode(const std::vector<CodePoint>& cps, std::size_t from, std::size_t to,
                   std::string_view text) {
  if (from >= to) return {};
  const std::size_t b = cps[from].byte;
  const std::size_t e = cps[to - 1].byte + cps[to - 1].width;
  return std::string(text.substr(b, e - b));
}

}  // namespace

std::vector<TextToken> tokenize_text(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<TextToken> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i].value;
    if (is_space_char(cp)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    const bool word = is_word_char(cp);
    if (word) {
      while (j < cps.size() && is_word_char(cps[j].value)) ++j;
    }
    tokens.push_back(TextToken{Interval(i, j), encode(cps, i, j, text), !word});
    i = j;
  }
  return tokens;
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  for (const auto& cp : decode_utf8(token)) {
    if (is_word_char(cp.value) || is_space_char(cp.value)) return false;
  }
  return true;
}

std::set<std::string> load_abbreviations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open abbreviation list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.insert(line);
  }
  return out;
}

std::vector<Interval> sentence_spans(std::string_view text,
                                     const SentenceSplitterOptions& options) {
  const auto cps = decode_utf8(text);
  const std::size_t n = cps.size();
  std::vector<Interval> out;

  std::size_t start = n;  // n means "no open sentence"
  auto close = [&](std::size_t end_exclusive) {
    std::size_t e = end_exclusive;
    while (e > start && is_space_char(cps[e - 1].value)) --e;
    if (e > start) out.emplace_back(start, e);
    start = n;
  };

  // Whitespace-delimited word ending at position `last` (inclusive).
  auto word_ending_at = [&](std::size_t last) {
    std::size_t b = last + 1;
    while (b > 0 && !is_space_char(cps[b - 1].value)) --b;
    while (b <= last && (cps[b].value == '(' || cps[b].value == '"' || cps[b].value == '\'' ||
                         cps[b].value == '[')) {
      ++b;
    }
    return encode(cps, b, last + 1, text);
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i].value;
    if (start == n) {
      if (is_space_char(cp)) {
        ++i;
        continue;
      }
      start = i;
    }
    if (cp == '\n' && options.newline_run > 0) {
      std::size_t j = i;
      std::size_t newlines = 0;
      while (j < n && is_space_char(cps[j].value)) {
        if (cps[j].value == '\n') ++newlines;
        ++j;
      }
      if (newlines >= options.newline_run) {
        close(i);
        i = j;
        continue;
      }
      i = j;
      continue;
    }
    if (is_terminator(cp)) {
      std::size_t last = i;
      while (last + 1 < n && is_terminator(cps[last + 1].value)) ++last;
      std::size_t j = last + 1;
      if (j < n && is_space_char(cps[j].value)) {
        std::size_t m = j;
        while (m < n && is_space_char(cps[m].value)) ++m;
        const bool abbreviation = cps[last].value == '.' &&
                                  options.abbreviations.count(word_ending_at(last)) != 0;
        if (m < n && is_upper_char(cps[m].value) && !abbreviation) {
          close(last + 1);
          i = m;
          continue;
        }
      }
      i = last + 1;
      continue;
    }
    ++i;
  }
  if (start != n) close(n);
  return out;
}

std::vector<Annotation> tokenize(const Document& doc) {
  std::vector<Annotation> out;
  std::size_t ordinal = 0;
  for (auto& tok : tokenize_text(doc.content())) {
    Annotation ann;
    ann.span = tok.span;
    ann.type = types::kToken;
    ann.value = std::move(tok.text);
    ann.attributes["ordinal"] = std::to_string(ordinal++);
    ann.provenance = "tokenizer";
    out.push_back(std::move(ann));
  }
  return out;
}

std::vector<Annotation> split_sentences(const Document& doc,
                                        const SentenceSplitterOptions& options) {
  std::vector<Annotation> out;
  std::size_t ordinal = 0;
  for (const Interval& span : sentence_spans(doc.content(), options)) {
    Annotation ann;
    ann.span = span;
    ann.type = types::kSentence;
    ann.attributes["ordinal"] = std::to_string(ordinal++);
    ann.provenance = "sentence_splitter";
    out.push_back(std::move(ann));
  }
  return out;
}

}  // namespace standoff
