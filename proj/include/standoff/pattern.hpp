#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/interval.hpp"

namespace standoff {

struct PatternOptions {
  bool case_insensitive = false;
  bool multiline = true;  // ^ and $ match at line breaks
  bool dotall = false;    // . matches a newline
};

struct GroupMatch {
  Interval span;
  std::string text;
};

struct PatternMatch {
  Interval span;
  std::string text;
  std::map<std::string, GroupMatch> groups;  // named groups that took part
};

// Perl-style regular expression over code points. Named groups may be
// written (?<name>...), (?'name'...) or (?P<name>...). Offsets in matches
// are code point offsets into the searched text.
class Pattern {
 public:
  // Throws ValidationError when the expression does not compile.
  Pattern(std::string source, PatternOptions options = {});
  ~Pattern();
  Pattern(const Pattern&);
  Pattern& operator=(const Pattern&);
  Pattern(Pattern&&) noexcept;
  Pattern& operator=(Pattern&&) noexcept;

  const std::string& source() const noexcept { return source_; }
  const PatternOptions& options() const noexcept { return options_; }
  const std::vector<std::string>& group_names() const noexcept { return groups_; }
  bool has_group(const std::string& name) const;

  // Leftmost match starting at or after `from` that ends by `to`. Text
  // before `from` still counts for ^, \b and lookbehind.
  std::optional<PatternMatch> search(const std::wstring& text, std::size_t from,
                                     std::size_t to) const;

 private:
  struct Impl;
  std::string source_;
  PatternOptions options_;
  std::vector<std::string> groups_;
  std::shared_ptr<const Impl> impl_;
};

// Text is searched as wide strings, one wchar_t per code point (wchar_t is
// 32 bits on the platforms we build for).
std::wstring to_wide(std::string_view utf8);
std::string to_utf8(std::wstring_view text);

// Named groups declared in a pattern source, in order of appearance.
std::vector<std::string> named_groups(const std::string& source);

}  // namespace standoff
