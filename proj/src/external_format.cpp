#include "standoff/external_format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "standoff/document.hpp"
#include "standoff/errors.hpp"

namespace standoff {

namespace {

void escape_into(std::string& out, std::string_view text, bool attribute) {
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case ';':
        if (attribute) out += "\\;"; else out += c;
        break;
      case '=':
        if (attribute) out += "\\="; else out += c;
        break;
      default: out += c;
    }
  }
}

// Splits on `sep` where it is not preceded by an escaping backslash. The
// pieces keep their escapes.
std::vector<std::string_view> split_raw(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
    } else if (text[i] == sep) {
      parts.push_back(text.substr(begin, i - begin));
      begin = i + 1;
    }
  }
  parts.push_back(text.substr(begin));
  return parts;
}

std::string unescape(std::string_view text, std::size_t line) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out += text[i];
      continue;
    }
    if (i + 1 >= text.size()) throw ParseError("dangling backslash escape", line, i);
    const char c = text[++i];
    switch (c) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\':
      case ';':
      case '=': out += c; break;
      default: throw ParseError(std::string("unknown escape \\") + c, line, i);
    }
  }
  return out;
}

Offset parse_offset(std::string_view field, const char* what, std::size_t line) {
  Offset value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("bad ") + what + " offset '" + std::string(field) + "'", line, 0);
  }
  return value;
}

}  // namespace

std::string format_external_line(const ExternalRecord& record) {
  std::string out;
  escape_into(out, record.doc_name, false);
  out += '\t';
  out += std::to_string(record.span.start());
  out += '\t';
  out += std::to_string(record.span.end());
  out += '\t';
  escape_into(out, record.type, false);
  out += '\t';
  escape_into(out, record.value, false);
  out += '\t';
  bool first = true;
  for (const auto& [key, value] : record.attributes) {
    if (!first) out += ';';
    first = false;
    escape_into(out, key, true);
    out += '=';
    escape_into(out, value, true);
  }
  return out;
}

ExternalRecord parse_external_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split_raw(line, '\t');
  if (fields.size() < 5 || fields.size() > 6) {
    throw ParseError("expected 5 or 6 tab-separated fields, found " +
                         std::to_string(fields.size()),
                     line_number, 0);
  }
  ExternalRecord rec;
  rec.doc_name = unescape(fields[0], line_number);
  const Offset start = parse_offset(fields[1], "start", line_number);
  const Offset end = parse_offset(fields[2], "end", line_number);
  if (end < start) {
    throw ParseError("end " + std::to_string(end) + " precedes start " + std::to_string(start),
                     line_number, 0);
  }
  rec.span = Interval(start, end);
  rec.type = unescape(fields[3], line_number);
  if (rec.type.empty()) throw ParseError("empty annotation type", line_number, 0);
  rec.value = unescape(fields[4], line_number);
  if (fields.size() == 6 && !fields[5].empty()) {
    for (std::string_view pair : split_raw(fields[5], ';')) {
      const auto kv = split_raw(pair, '=');
      if (kv.size() != 2) {
        throw ParseError("attribute '" + std::string(pair) + "' is not key=value", line_number, 0);
      }
      rec.attributes[unescape(kv[0], line_number)] = unescape(kv[1], line_number);
    }
  }
  return rec;
}

namespace {

using NumberedRecord = std::pair<std::size_t, ExternalRecord>;

// Parses every line, keeping line numbers. `accept` may reject a parsed
// record by throwing ParseError, or drop it by returning false.
template <typename Accept>
std::vector<NumberedRecord> parse_numbered(std::istream& in, const std::string& context,
                                           Accept accept) {
  std::vector<NumberedRecord> records;
  std::vector<std::size_t> bad;
  std::ostringstream messages;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    try {
      ExternalRecord rec = parse_external_line(line, number);
      if (accept(rec, number)) records.emplace_back(number, std::move(rec));
    } catch (const ParseError& e) {
      bad.push_back(number);
      messages << "\n  line " << number << ": " << e.what();
    }
  }
  if (!bad.empty()) throw ImportError(context + messages.str(), std::move(bad));
  return records;
}

}  // namespace

std::vector<ExternalRecord> parse_external_annotations(std::istream& in) {
  auto numbered = parse_numbered(in, "malformed annotation lines:",
                                 [](const ExternalRecord&, std::size_t) { return true; });
  std::vector<ExternalRecord> out;
  out.reserve(numbered.size());
  for (auto& [number, rec] : numbered) out.push_back(std::move(rec));
  return out;
}

std::size_t import_external_annotations(Document& doc, std::istream& in,
                                        std::string_view provenance) {
  auto mine = parse_numbered(
      in, "annotation import into '" + doc.name() + "' failed:",
      [&doc](const ExternalRecord& rec, std::size_t number) {
        if (rec.doc_name != doc.name()) return false;
        if (rec.span.end() > doc.length()) {
          throw ParseError("span end " + std::to_string(rec.span.end()) +
                               " past document length " + std::to_string(doc.length()),
                           number, 0);
        }
        return true;
      });
  for (auto& [number, rec] : mine) {
    Annotation ann;
    ann.span = rec.span;
    ann.type = std::move(rec.type);
    ann.value = std::move(rec.value);
    ann.attributes = std::move(rec.attributes);
    ann.provenance = std::string(provenance);
    doc.add_annotation(std::move(ann));
  }
  return mine.size();
}

std::size_t import_external_annotations(Document& doc, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open annotation file " + path.string());
  return import_external_annotations(doc, in, "import:" + path.filename().string());
}

ExternalRecord to_external(const Document& doc, const Annotation& ann) {
  return ExternalRecord{doc.name(), ann.span, ann.type, ann.value, ann.attributes};
}

void export_annotations(const Document& doc, std::ostream& out,
                        std::optional<std::string_view> type) {
  out << kExternalHeader << '\n';
  const auto anns = type ? doc.index().of_type(*type) : doc.index().all();
  for (const Annotation* ann : anns) out << format_external_line(to_external(doc, *ann)) << '\n';
}

}  // namespace standoff
