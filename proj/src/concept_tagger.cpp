#include "standoff/concept_tagger.hpp"

#include <algorithm>
#include <fstream>

#include "standoff/errors.hpp"
#include "standoff/text_segmentation.hpp"
#include "standoff/utf8.hpp"

namespace standoff {

namespace {

const std::vector<std::string> kNone;

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(trim(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos)));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

// Calls fn(fields, lineno) for every line that is not blank or a comment.
template <typename Fn>
void for_each_line(std::istream& in, Fn fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    fn(view, lineno);
  }
}

[[noreturn]] void bad_line(std::size_t lineno, const std::string& what) {
  throw ParseError("line " + std::to_string(lineno) + ": " + what, lineno, 0);
}

std::vector<std::string> folded_words(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize_text(text)) {
    if (!tok.punctuation) out.push_back(fold_case(tok.text));
  }
  return out;
}

}  // namespace

std::string Lexicon::join_key(std::span<const std::string> folded) {
  std::string key;
  for (std::size_t i = 0; i < folded.size(); ++i) {
    if (i) key += '\x1f';
    key += folded[i];
  }
  return key;
}

bool Lexicon::add_term(std::string_view term, const std::string& cui, std::string_view preferred) {
  const auto words = folded_words(term);
  if (words.empty()) return false;
  push_unique(entries_[join_key(words)], cui);
  if (!preferred.empty()) preferred_.emplace(cui, std::string(preferred));
  return true;
}

void Lexicon::add_tui(const std::string& cui, const std::string& tui) { push_unique(cui_to_tui_[cui], tui); }

void Lexicon::add_pos(std::string_view token, const std::string& tag) {
  push_unique(token_to_pos_[fold_case(token)], tag);
}

void Lexicon::add_function_word(std::string_view token) { function_words_.insert(fold_case(token)); }

const std::vector<std::string>* Lexicon::lookup(std::span<const std::string> folded) const {
  auto it = entries_.find(join_key(folded));
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& Lexicon::tuis(const std::string& cui) const {
  auto it = cui_to_tui_.find(cui);
  return it == cui_to_tui_.end() ? kNone : it->second;
}

const std::vector<std::string>& Lexicon::pos_tags(std::string_view token) const {
  auto it = token_to_pos_.find(fold_case(token));
  return it == token_to_pos_.end() ? kNone : it->second;
}

const std::string* Lexicon::preferred_term(const std::string& cui) const {
  auto it = preferred_.find(cui);
  return it == preferred_.end() ? nullptr : &it->second;
}

bool Lexicon::is_function_word(std::string_view token) const {
  return function_words_.count(fold_case(token)) != 0;
}

void read_terms(std::istream& in, Lexicon& lex) {
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    const auto f = split_tabs(line);
    if (f.size() < 2) bad_line(lineno, "expected term<TAB>CUI");
    if (f.size() > 3) bad_line(lineno, "too many fields");
    if (f[0].empty() || f[1].empty()) bad_line(lineno, "empty term or CUI");
    if (!lex.add_term(f[0], std::string(f[1]), f.size() == 3 ? f[2] : std::string_view{})) {
      bad_line(lineno, "term has no word tokens");
    }
  });
}

void read_tui_map(std::istream& in, Lexicon& lex) {
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    const auto f = split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty()) bad_line(lineno, "expected CUI<TAB>TUI");
    lex.add_tui(std::string(f[0]), std::string(f[1]));
  });
}

void read_pos_map(std::istream& in, Lexicon& lex) {
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    const auto f = split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty()) bad_line(lineno, "expected token<TAB>tag[,tag...]");
    std::string_view tags = f[1];
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = tags.find(',', pos);
      const auto tag = trim(tags.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (tag.empty()) bad_line(lineno, "empty POS tag");
      lex.add_pos(f[0], std::string(tag));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  });
}

void read_function_words(std::istream& in, Lexicon& lex) {
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    if (line.find('\t') != std::string_view::npos) bad_line(lineno, "expected one token per line");
    lex.add_function_word(line);
  });
}

Lexicon load_lexicon(const LexiconFiles& files) {
  if (files.max_phrase_tokens == 0) throw ValidationError("max_phrase_tokens must be positive");
  Lexicon lex;
  lex.max_phrase_tokens = files.max_phrase_tokens;
  auto read = [](const std::filesystem::path& path, auto reader, Lexicon& target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read lexicon file " + path.string());
    try {
      reader(in, target);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), e.line(), e.offset());
    }
  };
  read(files.terms, read_terms, lex);
  if (files.tui_map) read(*files.tui_map, read_tui_map, lex);
  if (files.pos_map) read(*files.pos_map, read_pos_map, lex);
  if (files.function_words) read(*files.function_words, read_function_words, lex);
  return lex;
}

std::vector<ConceptMatch> tag_sentence(std::span<const SentenceToken> tokens, const Lexicon& lex) {
  const std::size_t n = tokens.size();
  if (n == 0) return {};
  std::vector<std::string> folded(n);
  // next_punct[i]: index of the first punctuation token at or after i.
  std::vector<std::size_t> next_punct(n + 1, n);
  for (std::size_t i = n; i-- > 0;) {
    folded[i] = fold_case(tokens[i].text);
    next_punct[i] = is_punctuation_token(tokens[i].text) ? i : next_punct[i + 1];
  }
  const std::size_t limit = std::min(n, std::max<std::size_t>(lex.max_phrase_tokens, 1));

  // Longest first, then leftmost: anything contained in a match was
  // enumerated after it.
  std::vector<ConceptMatch> kept;
  for (std::size_t len = limit; len >= 1; --len) {
    for (std::size_t s = 0; s + len <= n; ++s) {
      const std::size_t e = s + len;
      if (next_punct[s] < e) continue;
      const auto* cuis = lex.lookup(std::span<const std::string>(folded).subspan(s, len));
      if (cuis == nullptr) continue;
      const bool contained = std::any_of(kept.begin(), kept.end(), [&](const ConceptMatch& k) {
        return k.token_start <= s && e <= k.token_end;
      });
      if (contained) continue;
      kept.push_back({s, e, Interval(tokens[s].span.start(), tokens[e - 1].span.end()), *cuis});
    }
  }
  std::erase_if(kept, [&](const ConceptMatch& m) {
    return m.token_end - m.token_start == 1 && lex.is_function_word(folded[m.token_start]);
  });
  std::sort(kept.begin(), kept.end(), [](const ConceptMatch& a, const ConceptMatch& b) {
    return std::pair(a.token_start, a.token_end) < std::pair(b.token_start, b.token_end);
  });
  return kept;
}

std::vector<std::vector<ConceptMatch>> tag_sentences_serial(
    std::span<const std::vector<SentenceToken>> sentences, const Lexicon& lex) {
  std::vector<std::vector<ConceptMatch>> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) out[i] = tag_sentence(sentences[i], lex);
  return out;
}

std::vector<std::vector<ConceptMatch>> tag_sentences(
    std::span<const std::vector<SentenceToken>> sentences, const Lexicon& lex) {
  std::vector<std::vector<ConceptMatch>> out(sentences.size());
  const auto count = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = tag_sentence(sentences[k], lex);
  }
  return out;
}

std::vector<SentenceToken> tokens_within(const Document& doc, const Interval& span) {
  std::vector<SentenceToken> out;
  for (const Annotation* tok : doc.index().within(span, types::kToken)) {
    out.push_back({tok->span, std::string(doc.text(tok->span))});
  }
  return out;
}

namespace {

std::vector<AnnotationId> add_matches(Document& doc, const std::vector<ConceptMatch>& matches,
                                      const Lexicon& lex) {
  std::vector<AnnotationId> ids;
  for (const auto& m : matches) {
    for (const auto& cui : m.cuis) {
      Annotation ann;
      ann.span = m.span;
      ann.type = types::kCui;
      ann.value = cui;
      ann.attributes["token_start"] = std::to_string(m.token_start);
      ann.attributes["token_end"] = std::to_string(m.token_end);
      if (const auto* pref = lex.preferred_term(cui)) ann.attributes["preferred"] = *pref;
      ann.provenance = kConceptProvenance;
      ids.push_back(doc.add_annotation(std::move(ann)));
    }
  }
  return ids;
}

}  // namespace

std::vector<AnnotationId> annotate_concepts(Document& doc, const Annotation& sentence,
                                            const Lexicon& lex) {
  const auto tokens = tokens_within(doc, sentence.span);
  return add_matches(doc, tag_sentence(tokens, lex), lex);
}

std::vector<AnnotationId> annotate_all_concepts(Document& doc, const Lexicon& lex, bool parallel) {
  std::vector<Interval> scopes;
  for (const Annotation* s : doc.index().of_type(types::kSentence)) scopes.push_back(s->span);
  if (scopes.empty()) scopes.emplace_back(0, doc.length());

  std::vector<std::vector<SentenceToken>> batch;
  batch.reserve(scopes.size());
  for (const auto& span : scopes) batch.push_back(tokens_within(doc, span));
  const auto matches = parallel ? tag_sentences(batch, lex) : tag_sentences_serial(batch, lex);

  std::vector<AnnotationId> ids;
  for (const auto& per_sentence : matches) {
    auto added = add_matches(doc, per_sentence, lex);
    ids.insert(ids.end(), added.begin(), added.end());
  }
  return ids;
}

std::vector<AnnotationId> annotate_tuis(Document& doc, const Lexicon& lex) {
  std::vector<Annotation> pending;
  for (const Annotation* c : doc.index().of_type(types::kCui)) {
    for (const auto& tui : lex.tuis(c->value)) {
      Annotation ann;
      ann.span = c->span;
      ann.type = types::kTui;
      ann.value = tui;
      ann.attributes["cui"] = c->value;
      ann.provenance = kTuiProvenance;
      pending.push_back(std::move(ann));
    }
  }
  std::vector<AnnotationId> ids;
  for (auto& ann : pending) ids.push_back(doc.add_annotation(std::move(ann)));
  return ids;
}

std::vector<AnnotationId> annotate_sp_pos(Document& doc, const Lexicon& lex) {
  std::vector<Annotation> pending;
  for (const Annotation* tok : doc.index().of_type(types::kToken)) {
    const auto& tags = lex.pos_tags(doc.text(tok->span));
    if (tags.empty()) continue;
    Annotation ann;
    ann.span = tok->span;
    ann.type = types::kSpPos;
    for (std::size_t i = 0; i < tags.size(); ++i) ann.value += (i ? "," : "") + tags[i];
    ann.provenance = kSpPosProvenance;
    pending.push_back(std::move(ann));
  }
  std::vector<AnnotationId> ids;
  for (auto& ann : pending) ids.push_back(doc.add_annotation(std::move(ann)));
  return ids;
}

}  // namespace standoff
