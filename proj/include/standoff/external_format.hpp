#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/annotation.hpp"

namespace standoff {

class Document;

// One line of the tab-separated interchange format:
//   doc_name \t start \t end \t type \t value \t key=value;key=value
// Offsets are 0-based half-open code point offsets. Backslash escapes
// (\t \n \r \\ and, inside attributes, \; \=) keep arbitrary text intact.
struct ExternalRecord {
  std::string doc_name;
  Interval span;
  std::string type;
  std::string value;
  AttributeMap attributes;

  friend bool operator==(const ExternalRecord&, const ExternalRecord&) = default;
};

inline constexpr std::string_view kExternalHeader = "#doc_name\tstart\tend\ttype\tvalue\tattributes";

std::string format_external_line(const ExternalRecord& record);
// Throws ParseError (with the given line number) on malformed input.
ExternalRecord parse_external_line(std::string_view line, std::size_t line_number = 0);

// Parses a whole stream; blank lines and '#' lines are skipped. Every bad
// line is collected before throwing ImportError, so the message lists all
// of them.
std::vector<ExternalRecord> parse_external_annotations(std::istream& in);

// Adds every record addressed to doc.name(); records for other documents
// are ignored. All-or-nothing: a bad line (including spans outside the
// document) raises ImportError and leaves the document untouched.
std::size_t import_external_annotations(Document& doc, std::istream& in,
                                        std::string_view provenance = "import");
std::size_t import_external_annotations(Document& doc, const std::filesystem::path& path);

ExternalRecord to_external(const Document& doc, const Annotation& ann);

// Header line followed by one line per annotation in canonical order.
void export_annotations(const Document& doc, std::ostream& out,
                        std::optional<std::string_view> type = std::nullopt);

}  // namespace standoff
