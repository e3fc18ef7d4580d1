#include "standoff/interval.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace standoff {

Interval::Interval(Offset start, Offset end) : start_(start), end_(end) {
  if (start > end) {
    throw std::invalid_argument("interval start " + std::to_string(start) +
                                " exceeds end " + std::to_string(end));
  }
}

std::ostream& operator<<(std::ostream& os, const Interval& i) {
  return os << '(' << i.start() << ',' << i.end() << ')';
}

std::strong_ordering canonical_compare(const Interval& a, const Interval& b) noexcept {
  return a <=> b;
}

AllenRelation inverse(AllenRelation rel) noexcept {
  switch (rel) {
    case AllenRelation::kEqual: return AllenRelation::kEqual;
    case AllenRelation::kBefore: return AllenRelation::kAfter;
    case AllenRelation::kAfter: return AllenRelation::kBefore;
    case AllenRelation::kMeets: return AllenRelation::kMetBy;
    case AllenRelation::kMetBy: return AllenRelation::kMeets;
    case AllenRelation::kDuring: return AllenRelation::kContains;
    case AllenRelation::kContains: return AllenRelation::kDuring;
    case AllenRelation::kStarts: return AllenRelation::kStartedBy;
    case AllenRelation::kStartedBy: return AllenRelation::kStarts;
    case AllenRelation::kFinishes: return AllenRelation::kFinishedBy;
    case AllenRelation::kFinishedBy: return AllenRelation::kFinishes;
    case AllenRelation::kOverlaps: return AllenRelation::kOverlappedBy;
    case AllenRelation::kOverlappedBy: return AllenRelation::kOverlaps;
  }
  return rel;
}

namespace {

struct RelationNames {
  AllenRelation rel;
  std::string_view name;
  std::string_view symbol;
};

constexpr std::array<RelationNames, kAllenRelationCount> kNames = {{
    {AllenRelation::kEqual, "eq", "="},
    {AllenRelation::kBefore, "before", "<"},
    {AllenRelation::kAfter, "after", ">"},
    {AllenRelation::kMeets, "meets", "m"},
    {AllenRelation::kMetBy, "met_by", "mi"},
    {AllenRelation::kDuring, "during", "d"},
    {AllenRelation::kContains, "contains", "di"},
    {AllenRelation::kStarts, "starts", "s"},
    {AllenRelation::kStartedBy, "started_by", "si"},
    {AllenRelation::kFinishes, "finishes", "f"},
    {AllenRelation::kFinishedBy, "finished_by", "fi"},
    {AllenRelation::kOverlaps, "overlaps", "o"},
    {AllenRelation::kOverlappedBy, "overlapped_by", "oi"},
}};

}  // namespace

std::string_view relation_name(AllenRelation rel) noexcept {
  return kNames[static_cast<std::size_t>(rel)].name;
}

std::optional<AllenRelation> parse_relation(std::string_view text) {
  std::string norm(text);
  for (char& c : norm) {
    c = (c == '-') ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (norm == "equal" || norm == "equals") norm = "eq";
  for (const auto& entry : kNames) {
    if (norm == entry.name || norm == entry.symbol) return entry.rel;
  }
  return std::nullopt;
}

bool holds(AllenRelation rel, const Interval& i, const Interval& j) noexcept {
  const Offset is = i.start(), ie = i.end(), js = j.start(), je = j.end();
  switch (rel) {
    case AllenRelation::kEqual: return is == js && ie == je;
    case AllenRelation::kBefore: return ie < js;
    case AllenRelation::kAfter: return is > je;
    case AllenRelation::kMeets: return ie == js;
    case AllenRelation::kMetBy: return je == is;
    case AllenRelation::kDuring: return is > js && ie < je;
    case AllenRelation::kContains: return js > is && je < ie;
    case AllenRelation::kStarts: return is == js && ie < je;
    case AllenRelation::kStartedBy: return is == js && ie > je;
    case AllenRelation::kFinishes: return js < is && ie == je;
    case AllenRelation::kFinishedBy: return js > is && ie == je;
    case AllenRelation::kOverlaps: return is < js && js < ie && ie < je;
    case AllenRelation::kOverlappedBy: return js < is && is < je && je < ie;
  }
  return false;
}

std::vector<AllenRelation> RelationSet::to_vector() const {
  std::vector<AllenRelation> out;
  for (AllenRelation rel : kAllRelations) {
    if (contains(rel)) out.push_back(rel);
  }
  return out;
}

RelationSet relate(const Interval& i, const Interval& j) noexcept {
  RelationSet set;
  for (AllenRelation rel : kAllRelations) {
    if (holds(rel, i, j)) set.insert(rel);
  }
  return set;
}

}  // namespace standoff
