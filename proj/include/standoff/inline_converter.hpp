#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "standoff/annotation.hpp"

namespace standoff {

class Document;

// How offsets are shown to people. Internally every span is 0-based
// half-open; kInclusive1 shows (s, e) as (s + 1, e), the 1-based inclusive
// numbering common in annotation tables.
enum class OffsetConvention { kHalfOpen0, kInclusive1 };

// Accepts "half-open-0" / "inclusive-1" (underscores also allowed).
OffsetConvention parse_convention(std::string_view name);
std::string_view convention_name(OffsetConvention c) noexcept;

std::pair<Offset, Offset> to_display(const Interval& span, OffsetConvention c) noexcept;
// Inverse of to_display. Throws ValidationError for pairs no span maps to.
Interval from_display(Offset start, Offset end, OffsetConvention c);

inline constexpr const char* kInlineProvenance = "inline_converter";

struct ConversionResult {
  std::string text;
  // One per element, canonical span order (document order among equal
  // spans). type = element name, value = TYPE attribute or the name.
  std::vector<Annotation> annotations;
};

// Strips every tag from an XML fragment. Character data is copied as is
// (after entity decoding); spans are code point offsets into the result.
// Malformed input or tags that do not nest raise ParseError whose offset
// is a byte offset into `inline_text` plus `base_offset`.
ConversionResult convert_inline(std::string_view inline_text, std::size_t base_offset = 0);

struct InlineRecord {
  std::string id;           // id attribute, else the 1-based ordinal
  std::string inline_text;  // raw content of the text elements, concatenated
  ConversionResult converted;
};

struct RecordOptions {
  std::string record_element = "RECORD";
  std::string text_element = "TEXT";
};

// One record per record element, in document order. The text elements of a
// record are concatenated; a record with none contributes all its content.
std::vector<InlineRecord> split_records(std::string_view corpus_xml, const RecordOptions& options = {});

// A document holding the plain text and the converted annotations.
Document to_document(std::string name, const ConversionResult& result);

struct OffsetRow {
  Offset start = 0;
  Offset end = 0;
  std::string type;
  std::string attributes;  // "Key=value;Key=value", keys capitalised

  friend bool operator==(const OffsetRow&, const OffsetRow&) = default;
};

inline constexpr std::string_view kOffsetTableHeader = "Start\tEnd\tAnnotation Type\tAnnotation Attribute";

// Rows in canonical span order. A null span gets a Null=true attribute.
std::vector<OffsetRow> render_offsets(std::span<const Annotation> annotations, OffsetConvention c);
void write_offset_table(std::ostream& out, std::span<const OffsetRow> rows);

}  // namespace standoff
