#include "standoff/section_detector.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "standoff/errors.hpp"
#include "standoff/xml.hpp"

namespace standoff {

namespace {

// --- guideline parsing -------------------------------------------------------

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

std::string element_path(const std::string& parent, const xml::Element& el) {
  std::string p = parent + "/" + el.name;
  if (const auto* name = el.attribute("name")) p += "[" + *name + "]";
  return p;
}

const std::string& required(const xml::Element& el, const std::string& path, const char* attr) {
  const std::string* v = el.attribute(attr);
  if (v == nullptr || v->empty()) invalid(path, std::string("missing attribute '") + attr + "'");
  return *v;
}

bool parse_bool(const std::string& path, const std::string& key, const std::string& value) {
  std::string v;
  for (char c : value) v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  invalid(path, "property '" + key + "' needs a boolean, got '" + value + "'");
}

PatternOptions options_from(const std::string& path, const std::map<std::string, std::string>& props) {
  PatternOptions opts;
  for (const auto& [key, value] : props) {
    if (key == "case_insensitive") opts.case_insensitive = parse_bool(path, key, value);
    else if (key == "multiline") opts.multiline = parse_bool(path, key, value);
    else if (key == "dotall") opts.dotall = parse_bool(path, key, value);
    else if (key != "name_from_group") invalid(path, "unknown property '" + key + "'");
  }
  return opts;
}

std::string pattern_source(const xml::Element& el, const std::string& path) {
  if (const auto* regex = el.attribute("regex")) {
    if (!regex->empty()) return *regex;
  }
  if (!el.text.empty()) return el.text;
  invalid(path, "pattern has neither a regex attribute nor text");
}

// Children shared by <section> and <template>.
struct Parts {
  std::vector<std::pair<std::string, std::string>> patterns;  // (path, source)
  std::map<std::string, std::string> properties;
  std::vector<AttributeExtractor> extractors;
  std::vector<const xml::Element*> sections;
};

Parts collect(const xml::Element& el, const std::string& path, bool allow_sections) {
  Parts parts;
  std::set<std::string> attr_names;
  for (const auto& child : el.children) {
    const std::string cpath = element_path(path, child);
    if (child.name == "pattern") {
      parts.patterns.emplace_back(cpath, pattern_source(child, cpath));
    } else if (child.name == "property") {
      const auto& key = required(child, cpath, "name");
      const std::string* value = child.attribute("value");
      if (value == nullptr) invalid(cpath, "missing attribute 'value'");
      if (!parts.properties.emplace(key, *value).second) {
        invalid(cpath, "property '" + key + "' given twice");
      }
    } else if (child.name == "attribute") {
      AttributeExtractor ex{required(child, cpath, "name"), required(child, cpath, "group")};
      if (!attr_names.insert(ex.name).second) invalid(cpath, "attribute '" + ex.name + "' given twice");
      parts.extractors.push_back(std::move(ex));
    } else if (child.name == "section" && allow_sections) {
      parts.sections.push_back(&child);
    } else {
      invalid(cpath, "unknown element <" + child.name + ">");
    }
  }
  return parts;
}

SectionSpec parse_section(const xml::Element& el, const std::string& parent_path) {
  const std::string path = element_path(parent_path, el);
  SectionSpec spec;
  spec.name = required(el, path, "name");
  Parts parts = collect(el, path, true);
  if (parts.patterns.empty()) invalid(path, "section needs at least one pattern");
  spec.properties = parts.properties;
  const PatternOptions opts = options_from(path, spec.properties);
  for (const auto& [ppath, src] : parts.patterns) {
    try {
      spec.heading_patterns.emplace_back(src, opts);
    } catch (const ValidationError& e) {
      invalid(ppath, e.what());
    }
  }
  if (auto it = spec.properties.find("name_from_group"); it != spec.properties.end()) {
    spec.name_from_group = it->second;
    for (std::size_t i = 0; i < spec.heading_patterns.size(); ++i) {
      if (!spec.heading_patterns[i].has_group(spec.name_from_group)) {
        invalid(parts.patterns[i].first,
                "name_from_group '" + spec.name_from_group + "' is not a group of this pattern");
      }
    }
  }
  for (const auto& ex : parts.extractors) {
    const bool found = std::any_of(spec.heading_patterns.begin(), spec.heading_patterns.end(),
                                   [&](const Pattern& p) { return p.has_group(ex.group); });
    if (!found) {
      invalid(path, "attribute '" + ex.name + "' refers to group '" + ex.group +
                        "', which no pattern of section '" + spec.name + "' defines");
    }
  }
  spec.extractors = std::move(parts.extractors);
  std::set<std::string> names;
  for (const auto* child : parts.sections) {
    spec.children.push_back(parse_section(*child, path));
    if (!names.insert(spec.children.back().name).second) {
      invalid(element_path(path, *child), "duplicate section name '" + spec.children.back().name + "'");
    }
  }
  return spec;
}

TemplateSpec parse_template(const xml::Element& el, const std::string& parent_path) {
  const std::string path = element_path(parent_path, el);
  TemplateSpec spec;
  spec.name = required(el, path, "name");
  Parts parts = collect(el, path, false);
  if (parts.patterns.size() != 1) invalid(path, "template needs exactly one pattern");
  spec.properties = parts.properties;
  if (spec.properties.count("name_from_group") != 0) {
    invalid(path, "name_from_group applies to sections only");
  }
  try {
    spec.body_pattern = Pattern(parts.patterns[0].second, options_from(path, spec.properties));
  } catch (const ValidationError& e) {
    invalid(parts.patterns[0].first, e.what());
  }
  for (const auto& ex : parts.extractors) {
    if (!spec.body_pattern.has_group(ex.group)) {
      invalid(path, "template '" + spec.name + "': attribute '" + ex.name + "' refers to group '" +
                        ex.group + "', which the pattern does not define");
    }
  }
  spec.extractors = std::move(parts.extractors);
  return spec;
}

// --- detection ----------------------------------------------------------------

struct Heading {
  PatternMatch match;
  std::size_t spec_index;
};

std::vector<Heading> find_headings(const std::wstring& text, const std::vector<SectionSpec>& specs,
                                   std::size_t lo, std::size_t hi) {
  struct Candidate {
    Heading h;
    std::size_t order;  // declaration order
  };
  std::vector<Candidate> all;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (const Pattern& p : specs[s].heading_patterns) {
      std::size_t pos = lo;
      while (pos <= hi) {
        auto m = p.search(text, pos, hi);
        if (!m) break;
        pos = m->span.start() + 1;
        if (m->span.null()) continue;
        all.push_back({Heading{std::move(*m), s}, s});
      }
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.h.match.span.start() != b.h.match.span.start()) {
      return a.h.match.span.start() < b.h.match.span.start();
    }
    if (a.order != b.order) return a.order < b.order;
    return a.h.match.span.length() > b.h.match.span.length();
  });
  std::vector<Heading> chosen;
  std::size_t last_end = lo;
  for (auto& c : all) {
    if (c.h.match.span.start() < last_end) continue;
    last_end = c.h.match.span.end();
    chosen.push_back(std::move(c.h));
  }
  return chosen;
}

void detect_scope(Document& doc, const std::wstring& text, const std::vector<SectionSpec>& specs,
                  std::size_t lo, std::size_t hi, int depth, std::optional<AnnotationId> parent,
                  std::vector<AnnotationId>& out) {
  if (specs.empty() || lo >= hi) return;
  const auto headings = find_headings(text, specs, lo, hi);
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const Heading& h = headings[i];
    const SectionSpec& spec = specs[h.spec_index];
    const std::size_t start = h.match.span.start();
    const std::size_t end = i + 1 < headings.size() ? headings[i + 1].match.span.start() : hi;

    Annotation ann;
    ann.span = Interval(start, end);
    ann.type = types::kSection;
    ann.value = spec.name;
    if (!spec.name_from_group.empty()) {
      if (auto g = h.match.groups.find(spec.name_from_group); g != h.match.groups.end()) {
        ann.value = g->second.text;
      }
    }
    ann.attributes["spec"] = spec.name;
    ann.attributes["heading_start"] = std::to_string(start);
    ann.attributes["heading_end"] = std::to_string(h.match.span.end());
    ann.attributes["depth"] = std::to_string(depth);
    if (parent) ann.attributes[kParentAttribute] = std::to_string(*parent);
    for (const auto& ex : spec.extractors) {
      if (auto g = h.match.groups.find(ex.group); g != h.match.groups.end()) {
        ann.attributes[ex.name] = g->second.text;
      }
    }
    ann.provenance = kSectionProvenance;
    const AnnotationId id = doc.add_annotation(std::move(ann));
    out.push_back(id);
    detect_scope(doc, text, spec.children, h.match.span.end(), end, depth + 1, id, out);
  }
}

}  // namespace

Guideline parse_guideline(std::string_view xml_text) {
  const xml::Element root = xml::parse_tree(xml_text);
  const std::string path = element_path("", root);
  if (root.name != "guideline") invalid(path, "root element must be <guideline>");
  Guideline g;
  if (const auto* name = root.attribute("name")) g.name = *name;
  std::set<std::string> sections, templates;
  for (const auto& child : root.children) {
    if (child.name == "section") {
      g.sections.push_back(parse_section(child, path));
      if (!sections.insert(g.sections.back().name).second) {
        invalid(element_path(path, child), "duplicate section name '" + g.sections.back().name + "'");
      }
    } else if (child.name == "template") {
      g.templates.push_back(parse_template(child, path));
      if (!templates.insert(g.templates.back().name).second) {
        invalid(element_path(path, child), "duplicate template name '" + g.templates.back().name + "'");
      }
    } else {
      invalid(element_path(path, child), "unknown element <" + child.name + ">");
    }
  }
  return g;
}

Guideline load_guideline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read guideline " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_guideline(buf.str());
}

std::vector<AnnotationId> detect_sections(Document& doc, const Guideline& guideline) {
  const std::wstring text = to_wide(doc.content());
  std::vector<AnnotationId> out;
  detect_scope(doc, text, guideline.sections, 0, text.size(), 0, std::nullopt, out);
  return out;
}

std::vector<AnnotationId> match_templates(Document& doc, const Guideline& guideline) {
  const std::wstring text = to_wide(doc.content());
  std::vector<AnnotationId> out;
  for (const TemplateSpec& t : guideline.templates) {
    std::set<std::size_t> ends;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto m = t.body_pattern.search(text, pos, text.size());
      if (!m) break;
      pos = m->span.start() + 1;
      if (m->span.null() || !ends.insert(m->span.end()).second) continue;
      Annotation ann;
      ann.span = m->span;
      ann.type = types::kTemplate;
      ann.value = t.name;
      if (t.extractors.empty()) {
        for (const auto& [name, g] : m->groups) ann.attributes[name] = g.text;
      } else {
        for (const auto& ex : t.extractors) {
          if (auto g = m->groups.find(ex.group); g != m->groups.end()) {
            ann.attributes[ex.name] = g->second.text;
          }
        }
      }
      ann.provenance = kTemplateProvenance;
      out.push_back(doc.add_annotation(std::move(ann)));
    }
  }
  return out;
}

}  // namespace standoff
