#include "standoff/utf8.hpp"

#include <algorithm>
#include <stdexcept>

namespace standoff {

namespace {

// Returns (code point, width); width 1 with U+FFFD on malformed input.
std::pair<char32_t, std::size_t> decode_one(std::string_view text, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t width = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    width = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    width = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    width = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + width > text.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < width; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, width};
}

}  // namespace

Utf8Index::Utf8Index(std::string_view text) : bytes_(text.size()) {
  const bool ascii = std::all_of(text.begin(), text.end(),
                                 [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) {
    chars_ = text.size();
    return;
  }
  for (std::size_t i = 0; i < text.size();) {
    starts_.push_back(i);
    i += decode_one(text, i).second;
  }
  chars_ = starts_.size();
}

std::size_t Utf8Index::byte_offset(Offset char_offset) const {
  if (char_offset > chars_) throw std::out_of_range("character offset past end of text");
  if (starts_.empty()) return char_offset;
  return char_offset == chars_ ? bytes_ : starts_[char_offset];
}

Offset Utf8Index::char_offset(std::size_t byte) const {
  if (byte > bytes_) throw std::out_of_range("byte offset past end of text");
  if (starts_.empty()) return byte;
  if (byte == bytes_) return chars_;
  auto it = std::lower_bound(starts_.begin(), starts_.end(), byte);
  if (it == starts_.end() || *it != byte) {
    throw std::invalid_argument("byte offset inside a multi-byte character");
  }
  return static_cast<Offset>(it - starts_.begin());
}

std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    auto [cp, width] = decode_one(text, i);
    out.push_back({cp, i, width});
    i += width;
  }
  return out;
}

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++n) i += decode_one(text, i).second;
  return n;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp) noexcept {
  if (cp >= 0x80) return cp != 0xA0 && cp != 0xFFFD;
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
}

bool is_space_char(char32_t cp) noexcept {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0;
}

bool is_upper_char(char32_t cp) noexcept { return cp >= 'A' && cp <= 'Z'; }

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace standoff
