#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/interval.hpp"

namespace standoff {

// Offsets everywhere are counted in Unicode code points. This maps them to
// byte positions in the underlying UTF-8 buffer. Pure-ASCII text takes the
// identity path and stores nothing.
class Utf8Index {
 public:
  Utf8Index() = default;
  explicit Utf8Index(std::string_view text);

  std::size_t char_count() const noexcept { return chars_; }
  std::size_t byte_offset(Offset char_offset) const;
  // Byte position -> code point offset. `byte` must sit on a boundary.
  Offset char_offset(std::size_t byte) const;

 private:
  std::size_t chars_ = 0;
  std::size_t bytes_ = 0;
  std::vector<std::size_t> starts_;  // empty when ASCII
};

// Decoded code point with its byte position. Malformed bytes decode to
// U+FFFD and consume one byte.
struct CodePoint {
  char32_t value;
  std::size_t byte;
  std::size_t width;
};

std::vector<CodePoint> decode_utf8(std::string_view text);
std::size_t count_code_points(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

// Character classes shared by the tokenizer, lexicon loading and the
// sentence splitter. Anything outside ASCII counts as a word character.
bool is_word_char(char32_t cp) noexcept;
bool is_space_char(char32_t cp) noexcept;
bool is_upper_char(char32_t cp) noexcept;

// ASCII case folding; other code points pass through unchanged.
std::string fold_case(std::string_view text);

}  // namespace standoff
