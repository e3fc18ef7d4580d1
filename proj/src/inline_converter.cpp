#include "standoff/inline_converter.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <tuple>

#include "standoff/document.hpp"
#include "standoff/errors.hpp"
#include "standoff/utf8.hpp"
#include "standoff/xml.hpp"

namespace standoff {

OffsetConvention parse_convention(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "half-open-0") return OffsetConvention::kHalfOpen0;
  if (n == "inclusive-1") return OffsetConvention::kInclusive1;
  throw ValidationError("unknown offset convention '" + std::string(name) +
                        "' (expected half-open-0 or inclusive-1)");
}

std::string_view convention_name(OffsetConvention c) noexcept {
  return c == OffsetConvention::kInclusive1 ? "inclusive-1" : "half-open-0";
}

std::pair<Offset, Offset> to_display(const Interval& span, OffsetConvention c) noexcept {
  if (c == OffsetConvention::kInclusive1) return {span.start() + 1, span.end()};
  return {span.start(), span.end()};
}

Interval from_display(Offset start, Offset end, OffsetConvention c) {
  if (c == OffsetConvention::kInclusive1) {
    if (start == 0 || start - 1 > end) {
      throw ValidationError("(" + std::to_string(start) + ", " + std::to_string(end) +
                            ") is not a valid 1-based inclusive span");
    }
    return Interval(start - 1, end);
  }
  if (start > end) {
    throw ValidationError("start " + std::to_string(start) + " is after end " + std::to_string(end));
  }
  return Interval(start, end);
}

namespace {

struct Open {
  std::string name;
  xml::Attributes attributes;
  Offset start;
  std::size_t order;
};

Annotation make_annotation(const Open& o, Offset end) {
  Annotation a;
  a.span = Interval(o.start, end);
  a.type = o.name;
  a.value = o.name;
  for (const auto& attr : o.attributes) {
    a.attributes[attr.name] = attr.value;
    if (attr.name == "TYPE") a.value = attr.value;
  }
  a.provenance = kInlineProvenance;
  return a;
}

}  // namespace

ConversionResult convert_inline(std::string_view inline_text, std::size_t base_offset) {
  ConversionResult out;
  std::vector<Open> open;
  std::vector<std::pair<std::size_t, Annotation>> done;
  Offset cp = 0;
  std::size_t order = 0;
  try {
    xml::Reader reader(inline_text);
    while (auto ev = reader.next()) {
      switch (ev->type) {
        case xml::EventType::kText:
          out.text += ev->text;
          cp += count_code_points(ev->text);
          break;
        case xml::EventType::kStartElement:
          open.push_back({ev->name, std::move(ev->attributes), cp, order++});
          break;
        case xml::EventType::kEndElement:
          // The reader has already checked that this closes open.back().
          done.emplace_back(open.back().order, make_annotation(open.back(), cp));
          open.pop_back();
          break;
      }
    }
  } catch (const ParseError& e) {
    if (base_offset == 0) throw;
    throw ParseError(e.what(), e.line(), e.offset() + base_offset);
  }
  std::stable_sort(done.begin(), done.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.span, a.first) < std::tie(b.second.span, b.first);
  });
  out.annotations.reserve(done.size());
  for (auto& [ord, a] : done) out.annotations.push_back(std::move(a));
  return out;
}

std::vector<InlineRecord> split_records(std::string_view corpus_xml, const RecordOptions& options) {
  std::vector<InlineRecord> out;
  xml::Reader reader(corpus_xml);

  struct Pending {
    InlineRecord record;
    std::size_t depth = 0;
    std::size_t content_begin = 0;
    std::vector<std::pair<std::size_t, std::size_t>> text_ranges;  // byte ranges of text element content
    std::size_t text_depth = 0;                                    // 0 = not inside a text element
    std::size_t text_begin = 0;
  };
  std::optional<Pending> cur;
  // Own depth count: self-closing tags yield a start and an end event but
  // never change the reader's depth.
  std::size_t level = 0;

  while (auto ev = reader.next()) {
    if (ev->type == xml::EventType::kStartElement) {
      ++level;
      if (!cur && ev->name == options.record_element) {
        cur.emplace();
        cur->depth = level;
        cur->content_begin = ev->offset + ev->raw_length;
        const auto* id = xml::find_attribute(ev->attributes, "ID");
        if (!id) id = xml::find_attribute(ev->attributes, "id");
        cur->record.id = id ? *id : std::to_string(out.size() + 1);
      } else if (cur && cur->text_depth == 0 && ev->name == options.text_element) {
        cur->text_depth = level;
        cur->text_begin = ev->offset + ev->raw_length;
      }
    } else if (ev->type == xml::EventType::kEndElement && level-- > 0 && cur) {
      if (cur->text_depth != 0 && level + 1 == cur->text_depth) {
        cur->text_ranges.emplace_back(cur->text_begin, ev->offset);
        cur->text_depth = 0;
      } else if (level + 1 == cur->depth) {
        if (cur->text_ranges.empty()) cur->text_ranges.emplace_back(cur->content_begin, ev->offset);
        for (const auto& [b, e] : cur->text_ranges) {
          // A self-closing element ends where its start tag ends.
          if (e <= b) continue;
          const auto raw = corpus_xml.substr(b, e - b);
          auto part = convert_inline(raw, b);
          const Offset shift = count_code_points(cur->record.converted.text);
          for (auto& a : part.annotations) {
            a.span = Interval(a.span.start() + shift, a.span.end() + shift);
            cur->record.converted.annotations.push_back(std::move(a));
          }
          cur->record.converted.text += part.text;
          cur->record.inline_text += raw;
        }
        std::stable_sort(cur->record.converted.annotations.begin(), cur->record.converted.annotations.end(),
                         [](const Annotation& a, const Annotation& b) { return a.span < b.span; });
        out.push_back(std::move(cur->record));
        cur.reset();
      }
    }
  }
  return out;
}

Document to_document(std::string name, const ConversionResult& result) {
  Document doc(std::move(name), result.text);
  for (const auto& a : result.annotations) {
    Annotation copy = a;
    copy.id = 0;
    doc.add_annotation(std::move(copy));
  }
  return doc;
}

namespace {

std::string capitalised(std::string_view key) {
  std::string out(key);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
  }
  return out;
}

}  // namespace

std::vector<OffsetRow> render_offsets(std::span<const Annotation> annotations, OffsetConvention c) {
  std::vector<const Annotation*> sorted;
  for (const auto& a : annotations) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Annotation* a, const Annotation* b) { return a->span < b->span; });
  std::vector<OffsetRow> rows;
  for (const Annotation* a : sorted) {
    OffsetRow row;
    std::tie(row.start, row.end) = to_display(a->span, c);
    row.type = a->type;
    for (const auto& [k, v] : a->attributes) {
      if (!row.attributes.empty()) row.attributes += ';';
      row.attributes += capitalised(k) + "=" + v;
    }
    if (a->span.null()) row.attributes += std::string(row.attributes.empty() ? "" : ";") + "Null=true";
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_offset_table(std::ostream& out, std::span<const OffsetRow> rows) {
  out << kOffsetTableHeader << '\n';
  for (const auto& r : rows) out << r.start << '\t' << r.end << '\t' << r.type << '\t' << r.attributes << '\n';
}

}  // namespace standoff
