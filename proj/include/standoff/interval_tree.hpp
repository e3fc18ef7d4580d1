#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "standoff/interval.hpp"

namespace standoff {

using EntryId = std::uint64_t;

struct TreeEntry {
  Interval interval;
  EntryId id = 0;

  friend auto operator<=>(const TreeEntry&, const TreeEntry&) = default;
  friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

struct QueryStats {
  std::size_t visited = 0;
};

// Read-only snapshot of one node, for tests and diagnostics.
struct NodeSummary {
  Interval key;
  std::size_t payloads = 0;
  bool black = true;
  Offset min_end = 0;
  Offset max_end = 0;
};

// Red-black tree keyed on intervals in canonical order. Each node carries
// every entry id that shares its exact interval, plus the minimum and
// maximum end offset over its subtree; queries use those bounds together
// with the key order to skip subtrees that cannot hold a match.
//
// Not internally synchronized: one writer, or any number of readers.
class IntervalTree {
 public:
  IntervalTree();

  // Throws DuplicateError when (interval, id) is already present.
  void insert(const Interval& interval, EntryId id);
  // Throws NotFoundError when (interval, id) is absent. The node goes away
  // only once its last payload is removed.
  void remove(const Interval& interval, EntryId id);

  bool contains(const Interval& interval, EntryId id) const;
  std::size_t size() const noexcept { return size_; }
  std::size_t node_count() const noexcept { return node_count_; }
  bool empty() const noexcept { return size_ == 0; }
  void clear();

  // Entries whose interval i satisfies `rel` relative to `b`, in canonical
  // order; ties on the interval are ordered by ascending id.
  std::vector<TreeEntry> query(AllenRelation rel, const Interval& b,
                               QueryStats* stats = nullptr) const;
  void query_into(AllenRelation rel, const Interval& b, std::vector<TreeEntry>& out,
                  QueryStats* stats = nullptr) const;

  // Number of nodes the equivalent query() examines.
  std::size_t visited_nodes(AllenRelation rel, const Interval& b) const;

  // In-order walk over entries with start >= min_start. The visitor returns
  // false to stop early.
  void scan_from(Offset min_start, const std::function<bool(const TreeEntry&)>& visit) const;

  std::vector<TreeEntry> entries() const;
  std::optional<NodeSummary> root() const;

  // Full structural check: BST order, red-black rules, augmentation,
  // parent links, and counters. Returns a description of the first
  // violation, or nullopt when the tree is sound.
  std::optional<std::string> audit() const;

 private:
  using Index = std::uint32_t;
  static constexpr Index kNil = 0;

  struct Node {
    Interval key;
    std::vector<EntryId> payloads;  // sorted ascending
    Index left = kNil;
    Index right = kNil;
    Index parent = kNil;
    bool red = false;
    Offset min_end = 0;
    Offset max_end = 0;
  };

  struct SearchBox;

  Index allocate(const Interval& key);
  void release(Index x);
  Index find_node(const Interval& key) const;
  Index minimum(Index x) const;
  void pull(Index x);
  void pull_to_root(Index x);
  void rotate_left(Index x);
  void rotate_right(Index x);
  void insert_fixup(Index z);
  void transplant(Index u, Index v);
  void erase_node(Index z);
  void erase_fixup(Index x);
  void search(Index x, AllenRelation rel, const Interval& b, const SearchBox& box,
              std::vector<TreeEntry>* out, std::size_t& visited) const;
  bool scan(Index x, Offset min_start,
            const std::function<bool(const TreeEntry&)>& visit) const;

  std::vector<Node> nodes_;
  std::vector<Index> free_;
  Index root_ = kNil;
  std::size_t size_ = 0;
  std::size_t node_count_ = 0;
};

struct RelationQuery {
  AllenRelation rel = AllenRelation::kEqual;
  Interval b;
};

// Runs many read-only queries against one tree. The serial form is the
// reference; the parallel form splits the query list across OpenMP threads
// and must return identical results.
std::vector<std::vector<TreeEntry>> batch_query_serial(const IntervalTree& tree,
                                                       std::span<const RelationQuery> queries);
std::vector<std::vector<TreeEntry>> batch_query(const IntervalTree& tree,
                                                std::span<const RelationQuery> queries);

}  // namespace standoff
