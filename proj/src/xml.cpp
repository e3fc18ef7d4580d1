#include "standoff/xml.hpp"

#include <cstdint>

#include "standoff/errors.hpp"
#include "standoff/utf8.hpp"

namespace standoff::xml {

namespace {

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

const std::string* find_attribute(const Attributes& attrs, std::string_view name) {
  for (const auto& a : attrs) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

std::string decode_entities(std::string_view raw, std::size_t base) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c != '&') {
      out += c;
      ++i;
      continue;
    }
    const std::size_t semi = raw.find(';', i);
    if (semi == std::string_view::npos || semi - i > 12) {
      throw ParseError("unterminated entity reference at byte " + std::to_string(base + i), 0,
                       base + i);
    }
    const std::string_view name = raw.substr(i + 1, semi - i - 1);
    if (name == "amp") {
      out += '&';
    } else if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else if (name.size() > 1 && name[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string_view digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char d : digits) {
        int v = -1;
        if (d >= '0' && d <= '9') v = d - '0';
        else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
        if (v < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      }
      if (!ok || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        throw ParseError("bad character reference &" + std::string(name) + "; at byte " +
                             std::to_string(base + i),
                         0, base + i);
      }
      append_utf8(out, cp);
    } else {
      throw ParseError("unknown entity &" + std::string(name) + "; at byte " +
                           std::to_string(base + i),
                       0, base + i);
    }
    i = semi + 1;
  }
  return out;
}

void Reader::fail(const std::string& message, std::size_t at) const {
  throw ParseError(message + " at byte " + std::to_string(at), 0, at);
}

void Reader::skip_space() {
  while (pos_ < input_.size() && is_space(input_[pos_])) ++pos_;
}

std::string Reader::read_name() {
  const std::size_t begin = pos_;
  if (pos_ >= input_.size() || !is_name_start(static_cast<unsigned char>(input_[pos_]))) {
    fail("expected a name", pos_);
  }
  while (pos_ < input_.size() && is_name_char(static_cast<unsigned char>(input_[pos_]))) ++pos_;
  return std::string(input_.substr(begin, pos_ - begin));
}

Event Reader::read_start_tag(std::size_t at) {
  Event ev;
  ev.type = EventType::kStartElement;
  ev.offset = at;
  ++pos_;  // '<'
  ev.name = read_name();
  for (;;) {
    const std::size_t before = pos_;
    skip_space();
    if (pos_ >= input_.size()) fail("unterminated tag <" + ev.name + ">", at);
    const char c = input_[pos_];
    if (c == '>') {
      ++pos_;
      open_.push_back(ev.name);
      break;
    }
    if (c == '/') {
      if (pos_ + 1 >= input_.size() || input_[pos_ + 1] != '>') fail("expected '/>'", pos_);
      pos_ += 2;
      Event end;
      end.type = EventType::kEndElement;
      end.name = ev.name;
      end.offset = pos_;
      pending_end_ = std::move(end);
      break;
    }
    if (before == pos_) fail("expected whitespace before attribute", pos_);
    Attribute attr;
    const std::size_t attr_at = pos_;
    attr.name = read_name();
    skip_space();
    if (pos_ >= input_.size() || input_[pos_] != '=') fail("expected '=' after attribute name", pos_);
    ++pos_;
    skip_space();
    if (pos_ >= input_.size() || (input_[pos_] != '"' && input_[pos_] != '\'')) {
      fail("expected quoted attribute value", pos_);
    }
    const char quote = input_[pos_++];
    const std::size_t close = input_.find(quote, pos_);
    if (close == std::string_view::npos) fail("unterminated attribute value", attr_at);
    const std::string_view raw = input_.substr(pos_, close - pos_);
    if (raw.find('<') != std::string_view::npos) fail("'<' inside attribute value", pos_);
    attr.value = decode_entities(raw, pos_);
    pos_ = close + 1;
    if (find_attribute(ev.attributes, attr.name) != nullptr) {
      fail("duplicate attribute '" + attr.name + "'", attr_at);
    }
    ev.attributes.push_back(std::move(attr));
  }
  ev.raw_length = pos_ - at;
  if (pending_end_) pending_end_->offset = pos_;
  return ev;
}

Event Reader::read_end_tag(std::size_t at) {
  pos_ += 2;  // "</"
  Event ev;
  ev.type = EventType::kEndElement;
  ev.offset = at;
  ev.name = read_name();
  skip_space();
  if (pos_ >= input_.size() || input_[pos_] != '>') fail("expected '>' in end tag", pos_);
  ++pos_;
  ev.raw_length = pos_ - at;
  if (open_.empty()) fail("end tag </" + ev.name + "> without a start tag", at);
  if (open_.back() != ev.name) {
    fail("tags do not nest: </" + ev.name + "> closes <" + open_.back() + ">", at);
  }
  open_.pop_back();
  return ev;
}

void Reader::skip_doctype(std::size_t at) {
  int bracket = 0;
  while (pos_ < input_.size()) {
    const char c = input_[pos_++];
    if (c == '[') ++bracket;
    else if (c == ']') --bracket;
    else if (c == '>' && bracket <= 0) return;
  }
  fail("unterminated declaration", at);
}

std::optional<Event> Reader::next() {
  if (pending_end_) {
    Event ev = std::move(*pending_end_);
    pending_end_.reset();
    return ev;
  }
  while (pos_ < input_.size()) {
    const std::size_t at = pos_;
    if (input_[pos_] != '<') {
      std::size_t end = input_.find('<', pos_);
      if (end == std::string_view::npos) end = input_.size();
      Event ev;
      ev.type = EventType::kText;
      ev.offset = at;
      ev.raw_length = end - at;
      ev.text = decode_entities(input_.substr(at, end - at), at);
      pos_ = end;
      return ev;
    }
    const std::string_view rest = input_.substr(pos_);
    if (rest.starts_with("<!--")) {
      const std::size_t close = input_.find("-->", pos_ + 4);
      if (close == std::string_view::npos) fail("unterminated comment", at);
      pos_ = close + 3;
      continue;
    }
    if (rest.starts_with("<![CDATA[")) {
      const std::size_t close = input_.find("]]>", pos_ + 9);
      if (close == std::string_view::npos) fail("unterminated CDATA section", at);
      Event ev;
      ev.type = EventType::kText;
      ev.offset = at;
      ev.text = std::string(input_.substr(pos_ + 9, close - pos_ - 9));
      pos_ = close + 3;
      ev.raw_length = pos_ - at;
      return ev;
    }
    if (rest.starts_with("<?")) {
      const std::size_t close = input_.find("?>", pos_ + 2);
      if (close == std::string_view::npos) fail("unterminated processing instruction", at);
      pos_ = close + 2;
      continue;
    }
    if (rest.starts_with("<!")) {
      pos_ += 2;
      skip_doctype(at);
      continue;
    }
    if (rest.starts_with("</")) return read_end_tag(at);
    return read_start_tag(at);
  }
  if (!open_.empty()) fail("input ended inside <" + open_.back() + ">", input_.size());
  return std::nullopt;
}

Element parse_tree(std::string_view input) {
  Reader reader(input);
  std::vector<Element> stack;
  std::optional<Element> root;
  while (auto ev = reader.next()) {
    switch (ev->type) {
      case EventType::kStartElement: {
        if (stack.empty() && root) {
          throw ParseError("second root element <" + ev->name + "> at byte " +
                               std::to_string(ev->offset),
                           0, ev->offset);
        }
        Element el;
        el.name = std::move(ev->name);
        el.attributes = std::move(ev->attributes);
        el.offset = ev->offset;
        stack.push_back(std::move(el));
        break;
      }
      case EventType::kEndElement: {
        Element done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) root = std::move(done);
        else stack.back().children.push_back(std::move(done));
        break;
      }
      case EventType::kText:
        if (stack.empty()) {
          for (char c : ev->text) {
            if (!is_space(c)) {
              throw ParseError("text outside the root element at byte " +
                                   std::to_string(ev->offset),
                               0, ev->offset);
            }
          }
        } else {
          stack.back().text += ev->text;
        }
        break;
    }
  }
  if (!root) throw ParseError("no root element", 0, input.size());
  return std::move(*root);
}

}  // namespace standoff::xml
