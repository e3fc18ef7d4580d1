#include "standoff/document.hpp"

#include <sstream>
#include <unordered_map>

#include "standoff/errors.hpp"

namespace standoff {

Document::Document(std::string name, std::string content, AttributeMap metadata)
    : name_(std::move(name)),
      content_(std::move(content)),
      utf8_(content_),
      metadata_(std::move(metadata)) {}

void Document::check_bounds(const Interval& span) const {
  if (span.end() > length()) {
    std::ostringstream os;
    os << "span " << span << " outside document '" << name_ << "' of length " << length();
    throw BoundsError(os.str());
  }
}

std::string_view Document::text(const Interval& span) const {
  check_bounds(span);
  const std::size_t b = utf8_.byte_offset(span.start());
  const std::size_t e = utf8_.byte_offset(span.end());
  return std::string_view(content_).substr(b, e - b);
}

void Document::set_metadata(std::string key, std::string value) {
  metadata_[std::move(key)] = std::move(value);
  metadata_dirty_ = true;
}

AnnotationId Document::add_annotation(Annotation ann) {
  check_bounds(ann.span);
  if (ann.type.empty()) throw ValidationError("annotation type must not be empty");
  if (ann.id == 0) {
    while (index_.contains(next_provisional_)) ++next_provisional_;
    ann.id = next_provisional_++;
  }
  ann.doc_id = id_;
  const AnnotationId id = ann.id;
  index_.insert(std::move(ann));
  dirty_.insert(id);
  removed_.erase(id);
  return id;
}

void Document::update_annotation(const Annotation& ann) {
  check_bounds(ann.span);
  if (ann.type.empty()) throw ValidationError("annotation type must not be empty");
  Annotation copy = ann;
  copy.doc_id = id_;
  index_.replace(copy);
  dirty_.insert(ann.id);
}

void Document::remove_annotation(AnnotationId id) {
  index_.erase(id);
  dirty_.erase(id);
  if (baseline_.count(id) != 0) removed_.insert(id);
}

const Annotation& Document::get(AnnotationId id) const {
  const Annotation* ann = index_.find(id);
  if (ann == nullptr) {
    throw NotFoundError("annotation " + std::to_string(id) + " not in document '" + name_ + "'");
  }
  return *ann;
}

std::vector<const Annotation*> Document::annotations_satisfying(
    AllenRelation rel, const Interval& b, std::optional<std::string_view> type) const {
  return index_.query(rel, b, type);
}

std::vector<const Annotation*> Document::next_annotations(
    const Annotation& anchor, std::size_t k, std::optional<std::string_view> type) const {
  return index_.starting_from(anchor.span.end(), k, type, anchor.id);
}

const Annotation* Document::baseline(AnnotationId id) const {
  auto it = baseline_.find(id);
  return it == baseline_.end() ? nullptr : &it->second;
}

void Document::assign_id(DocumentId id) {
  id_ = id;
  // Annotations carry their document id; re-stamp them without dirtying.
  for (const Annotation* ann : index_.all()) {
    if (ann->doc_id != id) {
      Annotation copy = *ann;
      copy.doc_id = id;
      index_.replace(copy);
    }
  }
}

void Document::restore_annotation(Annotation ann) {
  check_bounds(ann.span);
  ann.doc_id = id_;
  baseline_[ann.id] = ann;
  index_.insert(std::move(ann));
}

void Document::commit_sync(const std::vector<std::pair<AnnotationId, AnnotationId>>& renames) {
  std::set<AnnotationId> written = dirty_;
  // Two passes: a new id may equal an old id that is itself being renamed.
  std::vector<Annotation> moved;
  moved.reserve(renames.size());
  for (const auto& [from, to] : renames) {
    const Annotation* current = index_.find(from);
    if (current == nullptr) continue;
    moved.push_back(*current);
    moved.back().id = to;
    index_.erase(from);
    written.erase(from);
    baseline_.erase(from);
  }
  for (Annotation& ann : moved) {
    written.insert(ann.id);
    index_.insert(std::move(ann));
  }
  if (!renames.empty()) {
    std::unordered_map<std::string, std::string> ref_map;
    for (const auto& [from, to] : renames) ref_map.emplace(std::to_string(from), std::to_string(to));
    for (AnnotationId id : written) {
      const Annotation* ann = index_.find(id);
      if (ann == nullptr) continue;
      Annotation copy = *ann;
      bool changed = false;
      for (auto& [key, value] : copy.attributes) {
        if (!is_reference_attribute(key)) continue;
        if (auto it = ref_map.find(value); it != ref_map.end()) {
          value = it->second;
          changed = true;
        }
      }
      if (changed) index_.replace(copy);
    }
  }
  for (AnnotationId id : written) {
    if (const Annotation* ann = index_.find(id)) baseline_[id] = *ann;
  }
  for (AnnotationId id : removed_) baseline_.erase(id);
  dirty_.clear();
  removed_.clear();
  metadata_dirty_ = false;
}

}  // namespace standoff
