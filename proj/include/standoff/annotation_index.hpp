#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "standoff/annotation.hpp"
#include "standoff/interval_tree.hpp"

namespace standoff {

// One interval tree per document plus an id map and a per-type secondary
// index. All three are updated together; pointers handed out stay valid
// until the annotation is erased or replaced.
class AnnotationIndex {
 public:
  // Throws DuplicateError on a reused id.
  const Annotation& insert(Annotation ann);
  void erase(AnnotationId id);
  // Replaces every field except the id. Throws NotFoundError.
  const Annotation& replace(const Annotation& ann);

  const Annotation* find(AnnotationId id) const;
  bool contains(AnnotationId id) const { return by_id_.count(id) != 0; }
  std::size_t size() const noexcept { return by_id_.size(); }
  bool empty() const noexcept { return by_id_.empty(); }

  // Canonical order, ties broken by id.
  std::vector<const Annotation*> query(AllenRelation rel, const Interval& b,
                                       std::optional<std::string_view> type = std::nullopt,
                                       QueryStats* stats = nullptr) const;
  // Annotations whose span lies inside b: EQ, STARTS, DURING or FINISHES.
  std::vector<const Annotation*> within(const Interval& b,
                                        std::optional<std::string_view> type = std::nullopt) const;
  std::vector<const Annotation*> of_type(std::string_view type) const;
  std::vector<const Annotation*> all() const;
  // First k annotations (canonical order) starting at or after `from`.
  std::vector<const Annotation*> starting_from(Offset from, std::size_t k,
                                               std::optional<std::string_view> type,
                                               std::optional<AnnotationId> exclude) const;
  std::vector<std::string> type_names() const;

  const IntervalTree& tree() const noexcept { return tree_; }

  // Cross-checks tree, id map and type index. nullopt when coherent.
  std::optional<std::string> check_consistency() const;

 private:
  std::vector<const Annotation*> resolve(const std::vector<TreeEntry>& entries,
                                         std::optional<std::string_view> type) const;

  IntervalTree tree_;
  std::unordered_map<AnnotationId, Annotation> by_id_;
  std::unordered_map<std::string, std::set<AnnotationId>> by_type_;
};

}  // namespace standoff
