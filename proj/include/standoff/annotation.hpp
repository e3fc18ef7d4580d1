#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "standoff/interval.hpp"

namespace standoff {

using DocumentId = std::int64_t;
using AnnotationId = std::uint64_t;
using CorpusId = std::int64_t;

// Sorted, so serialization of the same map is always byte-identical.
using AttributeMap = std::map<std::string, std::string>;

// In-memory ids at or above this value have not been written to a store
// yet. Store-generated ids stay well below it.
inline constexpr AnnotationId kProvisionalIdBase = AnnotationId{1} << 62;

inline bool is_provisional(AnnotationId id) noexcept { return id >= kProvisionalIdBase; }

// Well-known type names produced by the built-in stages.
namespace types {
inline constexpr const char* kToken = "token";
inline constexpr const char* kSentence = "sentence";
inline constexpr const char* kSection = "section";
inline constexpr const char* kTemplate = "template";
inline constexpr const char* kCui = "CUI";
inline constexpr const char* kTui = "TUI";
inline constexpr const char* kSpPos = "SP-POS";
inline constexpr const char* kDependency = "dependency";
}  // namespace types

// Attribute holding the id of another annotation in the same document
// (a section's enclosing section). When the store replaces provisional ids
// it rewrites these values too.
inline constexpr const char* kParentAttribute = "parent";

inline bool is_reference_attribute(std::string_view key) noexcept { return key == kParentAttribute; }

struct Annotation {
  AnnotationId id = 0;
  DocumentId doc_id = 0;
  Interval span;
  std::string type;
  std::string value;
  AttributeMap attributes;
  std::string provenance;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

}  // namespace standoff
