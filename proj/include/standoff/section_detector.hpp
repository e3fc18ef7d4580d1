#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/document.hpp"
#include "standoff/pattern.hpp"

namespace standoff {

struct AttributeExtractor {
  std::string name;   // attribute written on the annotation
  std::string group;  // named capture group it comes from
};

struct SectionSpec {
  std::string name;
  std::vector<Pattern> heading_patterns;
  std::map<std::string, std::string> properties;
  std::vector<AttributeExtractor> extractors;
  std::vector<SectionSpec> children;

  // From properties; set by the parser.
  std::string name_from_group;
};

struct TemplateSpec {
  std::string name;
  Pattern body_pattern{"(?!)"};
  std::map<std::string, std::string> properties;
  std::vector<AttributeExtractor> extractors;
};

struct Guideline {
  std::string name;
  std::vector<SectionSpec> sections;
  std::vector<TemplateSpec> templates;
};

// Guideline files:
//
//   <guideline name="discharge">
//     <section name="history">
//       <pattern regex="^PAST MEDICAL HISTORY:"/>
//       <property name="case_insensitive" value="true"/>
//       <attribute name="title" group="title"/>
//       <section name="...">...</section>
//     </section>
//     <template name="differential">
//       <pattern>Differential:\s*(?&lt;polys&gt;\d+)\s*% polys</pattern>
//       <attribute name="polys" group="polys"/>
//     </template>
//   </guideline>
//
// A pattern is given either as the regex attribute or as element text.
// Properties: case_insensitive, multiline (default true), dotall (default
// false), name_from_group.
//
// Malformed XML raises ParseError; anything else wrong raises
// ValidationError whose message starts with the element path.
Guideline parse_guideline(std::string_view xml_text);
Guideline load_guideline(const std::filesystem::path& path);

inline constexpr const char* kSectionProvenance = "section_detector";
inline constexpr const char* kTemplateProvenance = "template_matcher";

// Finds headings in each scope (the whole document, then each section's
// body after its heading) and adds "section" annotations. A section runs
// from its heading to the next sibling heading or the end of its scope.
// Returns the ids of the added annotations in the order they were added.
std::vector<AnnotationId> detect_sections(Document& doc, const Guideline& guideline);

// Adds one "template" annotation per match of each template pattern.
// Matches may overlap; a match whose end coincides with an earlier match's
// end (a suffix of it) is not repeated.
std::vector<AnnotationId> match_templates(Document& doc, const Guideline& guideline);

}  // namespace standoff
