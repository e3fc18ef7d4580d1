#pragma once

#include <array>
#include <bitset>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace standoff {

using Offset = std::size_t;

// Half-open span [start, end). A null interval has start == end.
class Interval {
 public:
  constexpr Interval() = default;
  // Throws std::invalid_argument when start > end.
  Interval(Offset start, Offset end);

  constexpr Offset start() const noexcept { return start_; }
  constexpr Offset end() const noexcept { return end_; }
  constexpr Offset length() const noexcept { return end_ - start_; }
  constexpr bool null() const noexcept { return start_ == end_; }

  // Canonical order: by start, then by end.
  friend constexpr auto operator<=>(const Interval&, const Interval&) = default;
  friend constexpr bool operator==(const Interval&, const Interval&) = default;

 private:
  Offset start_ = 0;
  Offset end_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Interval& i);

// Three-way canonical comparison, exposed as a named operation for callers
// that want an explicit ordering rather than operator<=>.
std::strong_ordering canonical_compare(const Interval& a, const Interval& b) noexcept;

enum class AllenRelation : std::uint8_t {
  kEqual,
  kBefore,
  kAfter,
  kMeets,
  kMetBy,
  kDuring,
  kContains,
  kStarts,
  kStartedBy,
  kFinishes,
  kFinishedBy,
  kOverlaps,
  kOverlappedBy,
};

inline constexpr std::size_t kAllenRelationCount = 13;

inline constexpr std::array<AllenRelation, kAllenRelationCount> kAllRelations = {
    AllenRelation::kEqual,    AllenRelation::kBefore,     AllenRelation::kAfter,
    AllenRelation::kMeets,    AllenRelation::kMetBy,      AllenRelation::kDuring,
    AllenRelation::kContains, AllenRelation::kStarts,     AllenRelation::kStartedBy,
    AllenRelation::kFinishes, AllenRelation::kFinishedBy, AllenRelation::kOverlaps,
    AllenRelation::kOverlappedBy,
};

AllenRelation inverse(AllenRelation rel) noexcept;

// Lower-case tag used on the command line and in output ("met_by", ...).
std::string_view relation_name(AllenRelation rel) noexcept;

// Accepts the tag names above plus the single-letter symbols (=, <, >, m,
// mi, d, di, s, si, f, fi, o, oi). Hyphens are treated as underscores and
// matching ignores case.
std::optional<AllenRelation> parse_relation(std::string_view text);

// Does `rel` hold for i relative to j? The predicates are applied to the
// raw (start, end) pairs with no special casing of null intervals.
bool holds(AllenRelation rel, const Interval& i, const Interval& j) noexcept;

class RelationSet {
 public:
  void insert(AllenRelation rel) noexcept { bits_.set(static_cast<std::size_t>(rel)); }
  bool contains(AllenRelation rel) const noexcept {
    return bits_.test(static_cast<std::size_t>(rel));
  }
  std::size_t size() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }
  std::vector<AllenRelation> to_vector() const;

  friend bool operator==(const RelationSet&, const RelationSet&) = default;

 private:
  std::bitset<kAllenRelationCount> bits_;
};

// Every relation whose predicate holds. Exactly one for two non-null
// intervals; possibly several when either interval is null.
RelationSet relate(const Interval& i, const Interval& j) noexcept;

}  // namespace standoff
