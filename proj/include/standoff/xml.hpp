#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace standoff::xml {

// A small pull parser for the XML we read: guideline files and inline
// annotated text. Offsets are byte offsets into the input.
//
// Handles elements, attributes, character and entity references, CDATA,
// comments, processing instructions and a DOCTYPE (skipped). Text outside
// any element is allowed, so a fragment such as
// "a <b>c</b> d" reads fine. Errors are ParseError with offset() set.

struct Attribute {
  std::string name;
  std::string value;
};

using Attributes = std::vector<Attribute>;

const std::string* find_attribute(const Attributes& attrs, std::string_view name);

enum class EventType { kStartElement, kEndElement, kText };

struct Event {
  EventType type = EventType::kText;
  std::string name;         // elements
  Attributes attributes;    // start elements
  std::string text;         // decoded character data
  std::size_t offset = 0;   // where the tag or text begins in the input
  std::size_t raw_length = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view input) : input_(input) {}

  // Next event, or nullopt at the end of the input. End tags must match
  // the open element; an unmatched one is reported as tags that do not
  // nest.
  std::optional<Event> next();

  std::size_t depth() const noexcept { return open_.size(); }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t at) const;
  std::string read_name();
  void skip_space();
  Event read_start_tag(std::size_t at);
  Event read_end_tag(std::size_t at);
  void skip_doctype(std::size_t at);

  std::string_view input_;
  std::size_t pos_ = 0;
  std::vector<std::string> open_;
  std::optional<Event> pending_end_;
};

// Replaces entity and character references. `base` is added to offsets in
// error messages.
std::string decode_entities(std::string_view raw, std::size_t base = 0);

// Minimal tree for configuration-style files.
struct Element {
  std::string name;
  Attributes attributes;
  std::vector<Element> children;
  std::string text;  // direct character data, concatenated
  std::size_t offset = 0;

  const std::string* attribute(std::string_view key) const { return find_attribute(attributes, key); }
};

// Exactly one root element; only whitespace may sit outside it.
Element parse_tree(std::string_view input);

}  // namespace standoff::xml
