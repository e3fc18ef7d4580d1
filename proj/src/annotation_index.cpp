#include "standoff/annotation_index.hpp"

#include <algorithm>
#include <tuple>

#include "standoff/errors.hpp"

namespace standoff {

const Annotation& AnnotationIndex::insert(Annotation ann) {
  if (by_id_.count(ann.id) != 0) {
    throw DuplicateError("annotation id " + std::to_string(ann.id) + " already indexed");
  }
  tree_.insert(ann.span, ann.id);
  by_type_[ann.type].insert(ann.id);
  auto [it, inserted] = by_id_.emplace(ann.id, std::move(ann));
  return it->second;
}

void AnnotationIndex::erase(AnnotationId id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw NotFoundError("annotation id " + std::to_string(id) + " not indexed");
  }
  tree_.remove(it->second.span, id);
  auto type_it = by_type_.find(it->second.type);
  type_it->second.erase(id);
  if (type_it->second.empty()) by_type_.erase(type_it);
  by_id_.erase(it);
}

const Annotation& AnnotationIndex::replace(const Annotation& ann) {
  auto it = by_id_.find(ann.id);
  if (it == by_id_.end()) {
    throw NotFoundError("annotation id " + std::to_string(ann.id) + " not indexed");
  }
  Annotation& current = it->second;
  if (current.span != ann.span) {
    tree_.remove(current.span, ann.id);
    tree_.insert(ann.span, ann.id);
  }
  if (current.type != ann.type) {
    auto type_it = by_type_.find(current.type);
    type_it->second.erase(ann.id);
    if (type_it->second.empty()) by_type_.erase(type_it);
    by_type_[ann.type].insert(ann.id);
  }
  current = ann;
  return current;
}

const Annotation* AnnotationIndex::find(AnnotationId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::vector<const Annotation*> AnnotationIndex::resolve(
    const std::vector<TreeEntry>& entries, std::optional<std::string_view> type) const {
  std::vector<const Annotation*> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    const Annotation& ann = by_id_.at(e.id);
    if (!type || ann.type == *type) out.push_back(&ann);
  }
  return out;
}

std::vector<const Annotation*> AnnotationIndex::query(AllenRelation rel, const Interval& b,
                                                      std::optional<std::string_view> type,
                                                      QueryStats* stats) const {
  if (type && by_type_.find(std::string(*type)) == by_type_.end()) return {};
  return resolve(tree_.query(rel, b, stats), type);
}

std::vector<const Annotation*> AnnotationIndex::within(const Interval& b,
                                                       std::optional<std::string_view> type) const {
  std::vector<TreeEntry> entries;
  for (AllenRelation rel : {AllenRelation::kEqual, AllenRelation::kStarts, AllenRelation::kDuring,
                            AllenRelation::kFinishes}) {
    tree_.query_into(rel, b, entries);
  }
  // A null b can satisfy more than one of these for the same entry.
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  return resolve(entries, type);
}

std::vector<const Annotation*> AnnotationIndex::of_type(std::string_view type) const {
  std::vector<const Annotation*> out;
  auto it = by_type_.find(std::string(type));
  if (it == by_type_.end()) return out;
  for (AnnotationId id : it->second) out.push_back(&by_id_.at(id));
  std::sort(out.begin(), out.end(), [](const Annotation* a, const Annotation* b) {
    return std::tie(a->span, a->id) < std::tie(b->span, b->id);
  });
  return out;
}

std::vector<const Annotation*> AnnotationIndex::all() const {
  return resolve(tree_.entries(), std::nullopt);
}

std::vector<const Annotation*> AnnotationIndex::starting_from(
    Offset from, std::size_t k, std::optional<std::string_view> type,
    std::optional<AnnotationId> exclude) const {
  std::vector<const Annotation*> out;
  if (k == 0) return out;
  tree_.scan_from(from, [&](const TreeEntry& e) {
    if (exclude && e.id == *exclude) return true;
    const Annotation& ann = by_id_.at(e.id);
    if (!type || ann.type == *type) out.push_back(&ann);
    return out.size() < k;
  });
  return out;
}

std::vector<std::string> AnnotationIndex::type_names() const {
  std::vector<std::string> names;
  for (const auto& [name, ids] : by_type_) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<std::string> AnnotationIndex::check_consistency() const {
  if (auto problem = tree_.audit()) return "tree: " + *problem;
  if (tree_.size() != by_id_.size()) return std::string("tree size differs from id map");
  std::size_t typed = 0;
  for (const auto& [name, ids] : by_type_) {
    typed += ids.size();
    for (AnnotationId id : ids) {
      auto it = by_id_.find(id);
      if (it == by_id_.end()) return "type index holds unknown id " + std::to_string(id);
      if (it->second.type != name) return "type index misfiles id " + std::to_string(id);
    }
  }
  if (typed != by_id_.size()) return std::string("type index size differs from id map");
  for (const auto& [id, ann] : by_id_) {
    if (ann.id != id) return "id map key mismatch for " + std::to_string(id);
    if (!tree_.contains(ann.span, id)) return "tree missing id " + std::to_string(id);
  }
  return std::nullopt;
}

}  // namespace standoff
