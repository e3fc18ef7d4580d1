#include "standoff/pattern.hpp"

#include <boost/regex.hpp>

#include "standoff/errors.hpp"
#include "standoff/utf8.hpp"

static_assert(sizeof(wchar_t) == 4, "code point offsets need a 32-bit wchar_t");

namespace standoff {

namespace {

bool group_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Boost spells Python's (?P<name> as (?<name>.
std::string normalize_source(const std::string& src) {
  std::string out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '\\' && i + 1 < src.size()) {
      out += src[i];
      out += src[++i];
      continue;
    }
    if (src.compare(i, 4, "(?P<") == 0) {
      out += "(?<";
      i += 3;
      continue;
    }
    out += src[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> named_groups(const std::string& source) {
  std::vector<std::string> names;
  bool in_class = false;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const char c = source[i];
    if (c == '\\') {
      ++i;
      continue;
    }
    if (in_class) {
      if (c == ']') in_class = false;
      continue;
    }
    if (c == '[') {
      in_class = true;
      // A ']' right after '[' or '[^' is literal.
      if (i + 1 < source.size() && source[i + 1] == '^') ++i;
      if (i + 1 < source.size() && source[i + 1] == ']') ++i;
      continue;
    }
    if (c != '(' || i + 2 >= source.size() || source[i + 1] != '?') continue;
    std::size_t j = i + 2;
    char close = 0;
    if (source[j] == 'P' && j + 1 < source.size() && source[j + 1] == '<') {
      j += 2;
      close = '>';
    } else if (source[j] == '<') {
      ++j;
      close = '>';
    } else if (source[j] == '\'') {
      ++j;
      close = '\'';
    } else {
      continue;
    }
    std::size_t k = j;
    while (k < source.size() && group_name_char(source[k])) ++k;
    // (?<= and (?<! are lookbehinds, not names.
    if (k > j && k < source.size() && source[k] == close) names.push_back(source.substr(j, k - j));
  }
  return names;
}

std::wstring to_wide(std::string_view utf8) {
  std::wstring out;
  out.reserve(utf8.size());
  for (const CodePoint& cp : decode_utf8(utf8)) out.push_back(static_cast<wchar_t>(cp.value));
  return out;
}

std::string to_utf8(std::wstring_view text) {
  std::string out;
  out.reserve(text.size());
  for (wchar_t c : text) append_utf8(out, static_cast<char32_t>(c));
  return out;
}

struct Pattern::Impl {
  boost::wregex re;
};

Pattern::Pattern(std::string source, PatternOptions options)
    : source_(std::move(source)), options_(options), groups_(named_groups(source_)) {
  boost::regex_constants::syntax_option_type flags = boost::regex_constants::perl;
  if (options_.case_insensitive) flags |= boost::regex_constants::icase;
  if (!options_.multiline) flags |= boost::regex_constants::no_mod_m;
  flags |= options_.dotall ? boost::regex_constants::mod_s : boost::regex_constants::no_mod_s;
  auto impl = std::make_shared<Impl>();
  try {
    impl->re.assign(to_wide(normalize_source(source_)), flags);
  } catch (const boost::regex_error& e) {
    throw ValidationError("pattern '" + source_ + "' does not compile: " + e.what());
  }
  impl_ = std::move(impl);
}

Pattern::~Pattern() = default;
Pattern::Pattern(const Pattern&) = default;
Pattern& Pattern::operator=(const Pattern&) = default;
Pattern::Pattern(Pattern&&) noexcept = default;
Pattern& Pattern::operator=(Pattern&&) noexcept = default;

bool Pattern::has_group(const std::string& name) const {
  for (const auto& g : groups_) {
    if (g == name) return true;
  }
  return false;
}

std::optional<PatternMatch> Pattern::search(const std::wstring& text, std::size_t from,
                                            std::size_t to) const {
  to = std::min(to, text.size());
  if (from > to) return std::nullopt;
  boost::match_flag_type flags = boost::match_default;
  if (from > 0) flags |= boost::match_prev_avail;
  if (to < text.size()) flags |= boost::match_not_eob;
  // Past the end of a scope is not the end of the text, but a line break
  // right there still ends a line, which multiline $ sees on its own.
  if (to < text.size()) flags |= boost::match_not_eol;

  const auto begin = text.begin();
  boost::wsmatch m;
  if (!boost::regex_search(begin + static_cast<std::ptrdiff_t>(from),
                           begin + static_cast<std::ptrdiff_t>(to), m, impl_->re, flags)) {
    return std::nullopt;
  }
  PatternMatch out;
  const auto pos = [&](auto it) { return static_cast<Offset>(it - begin); };
  out.span = Interval(pos(m[0].first), pos(m[0].second));
  const auto slice = [&](const Interval& span) {
    return to_utf8(std::wstring_view(text).substr(span.start(), span.length()));
  };
  out.text = slice(out.span);
  for (const auto& name : groups_) {
    const auto& g = m[to_wide(name)];
    if (!g.matched) continue;
    const Interval span(pos(g.first), pos(g.second));
    out.groups[name] = GroupMatch{span, slice(span)};
  }
  return out;
}

}  // namespace standoff
