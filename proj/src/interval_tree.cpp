#include "standoff/interval_tree.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "standoff/errors.hpp"

namespace standoff {

namespace {

constexpr Offset kMaxOffset = std::numeric_limits<Offset>::max();

std::string describe(const Interval& i, EntryId id) {
  std::ostringstream os;
  os << i << " id " << id;
  return os.str();
}

}  // namespace

// Necessary bounds on (start, end) for any interval that can satisfy a
// relation against b. A node is checked exactly with holds(); the box only
// decides which subtrees are worth entering.
struct IntervalTree::SearchBox {
  Offset start_lo = 0, start_hi = kMaxOffset;
  Offset end_lo = 0, end_hi = kMaxOffset;
  bool empty = false;

  static SearchBox make(AllenRelation rel, const Interval& b) {
    const Offset bs = b.start(), be = b.end();
    SearchBox box;
    auto below = [&box](Offset v) {
      if (v == 0) box.empty = true;
      return v == 0 ? 0 : v - 1;
    };
    auto above = [&box](Offset v) {
      if (v == kMaxOffset) box.empty = true;
      return v == kMaxOffset ? v : v + 1;
    };
    switch (rel) {
      case AllenRelation::kEqual:
        box.start_lo = box.start_hi = bs;
        box.end_lo = box.end_hi = be;
        break;
      case AllenRelation::kBefore:
        box.start_hi = below(bs);
        box.end_hi = below(bs);
        break;
      case AllenRelation::kAfter:
        box.start_lo = above(be);
        box.end_lo = above(be);
        break;
      case AllenRelation::kMeets:
        box.start_hi = bs;
        box.end_lo = box.end_hi = bs;
        break;
      case AllenRelation::kMetBy:
        box.start_lo = box.start_hi = be;
        box.end_lo = be;
        break;
      case AllenRelation::kDuring:
        box.start_lo = above(bs);
        box.end_hi = below(be);
        break;
      case AllenRelation::kContains:
        box.start_hi = below(bs);
        box.end_lo = above(be);
        break;
      case AllenRelation::kStarts:
        box.start_lo = box.start_hi = bs;
        box.end_hi = below(be);
        break;
      case AllenRelation::kStartedBy:
        box.start_lo = box.start_hi = bs;
        box.end_lo = above(be);
        break;
      case AllenRelation::kFinishes:
        box.start_lo = above(bs);
        box.end_lo = box.end_hi = be;
        break;
      case AllenRelation::kFinishedBy:
        box.start_hi = below(bs);
        box.end_lo = box.end_hi = be;
        break;
      case AllenRelation::kOverlaps:
        box.start_hi = below(bs);
        box.end_lo = above(bs);
        box.end_hi = below(be);
        break;
      case AllenRelation::kOverlappedBy:
        box.start_lo = above(bs);
        box.start_hi = below(be);
        box.end_lo = above(be);
        break;
    }
    if (box.start_lo > box.start_hi || box.end_lo > box.end_hi) box.empty = true;
    return box;
  }
};

IntervalTree::IntervalTree() {
  Node nil;
  nil.red = false;
  nil.min_end = kMaxOffset;
  nil.max_end = 0;
  nodes_.push_back(nil);
}

void IntervalTree::clear() {
  nodes_.resize(1);
  nodes_[kNil].parent = kNil;
  free_.clear();
  root_ = kNil;
  size_ = 0;
  node_count_ = 0;
}

IntervalTree::Index IntervalTree::allocate(const Interval& key) {
  Index x;
  if (!free_.empty()) {
    x = free_.back();
    free_.pop_back();
    nodes_[x] = Node{};
  } else {
    if (nodes_.size() >= std::numeric_limits<Index>::max()) {
      throw std::length_error("interval tree node limit reached");
    }
    x = static_cast<Index>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[x];
  n.key = key;
  n.red = true;
  n.min_end = n.max_end = key.end();
  ++node_count_;
  return x;
}

void IntervalTree::release(Index x) {
  nodes_[x].payloads.clear();
  nodes_[x].payloads.shrink_to_fit();
  free_.push_back(x);
  --node_count_;
}

IntervalTree::Index IntervalTree::find_node(const Interval& key) const {
  Index x = root_;
  while (x != kNil) {
    const Interval& k = nodes_[x].key;
    if (key == k) return x;
    x = key < k ? nodes_[x].left : nodes_[x].right;
  }
  return kNil;
}

IntervalTree::Index IntervalTree::minimum(Index x) const {
  while (nodes_[x].left != kNil) x = nodes_[x].left;
  return x;
}

void IntervalTree::pull(Index x) {
  Node& n = nodes_[x];
  const Node& l = nodes_[n.left];
  const Node& r = nodes_[n.right];
  n.min_end = std::min({n.key.end(), l.min_end, r.min_end});
  n.max_end = std::max({n.key.end(), l.max_end, r.max_end});
}

void IntervalTree::pull_to_root(Index x) {
  while (x != kNil) {
    pull(x);
    x = nodes_[x].parent;
  }
}

void IntervalTree::rotate_left(Index x) {
  Index y = nodes_[x].right;
  nodes_[x].right = nodes_[y].left;
  if (nodes_[y].left != kNil) nodes_[nodes_[y].left].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  if (nodes_[x].parent == kNil) {
    root_ = y;
  } else if (x == nodes_[nodes_[x].parent].left) {
    nodes_[nodes_[x].parent].left = y;
  } else {
    nodes_[nodes_[x].parent].right = y;
  }
  nodes_[y].left = x;
  nodes_[x].parent = y;
  pull(x);
  pull(y);
}

void IntervalTree::rotate_right(Index x) {
  Index y = nodes_[x].left;
  nodes_[x].left = nodes_[y].right;
  if (nodes_[y].right != kNil) nodes_[nodes_[y].right].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  if (nodes_[x].parent == kNil) {
    root_ = y;
  } else if (x == nodes_[nodes_[x].parent].right) {
    nodes_[nodes_[x].parent].right = y;
  } else {
    nodes_[nodes_[x].parent].left = y;
  }
  nodes_[y].right = x;
  nodes_[x].parent = y;
  pull(x);
  pull(y);
}

void IntervalTree::insert(const Interval& interval, EntryId id) {
  Index parent = kNil;
  Index x = root_;
  while (x != kNil) {
    const Interval& k = nodes_[x].key;
    if (interval == k) {
      auto& payloads = nodes_[x].payloads;
      auto it = std::lower_bound(payloads.begin(), payloads.end(), id);
      if (it != payloads.end() && *it == id) {
        throw DuplicateError("duplicate interval tree entry " + describe(interval, id));
      }
      payloads.insert(it, id);
      ++size_;
      return;
    }
    parent = x;
    x = interval < k ? nodes_[x].left : nodes_[x].right;
  }

  Index z = allocate(interval);
  nodes_[z].payloads.push_back(id);
  nodes_[z].parent = parent;
  if (parent == kNil) {
    root_ = z;
  } else if (interval < nodes_[parent].key) {
    nodes_[parent].left = z;
  } else {
    nodes_[parent].right = z;
  }
  ++size_;
  pull_to_root(parent);
  insert_fixup(z);
}

void IntervalTree::insert_fixup(Index z) {
  while (nodes_[nodes_[z].parent].red) {
    Index p = nodes_[z].parent;
    Index g = nodes_[p].parent;
    if (p == nodes_[g].left) {
      Index uncle = nodes_[g].right;
      if (nodes_[uncle].red) {
        nodes_[p].red = false;
        nodes_[uncle].red = false;
        nodes_[g].red = true;
        z = g;
      } else {
        if (z == nodes_[p].right) {
          z = p;
          rotate_left(z);
          p = nodes_[z].parent;
          g = nodes_[p].parent;
        }
        nodes_[p].red = false;
        nodes_[g].red = true;
        rotate_right(g);
      }
    } else {
      Index uncle = nodes_[g].left;
      if (nodes_[uncle].red) {
        nodes_[p].red = false;
        nodes_[uncle].red = false;
        nodes_[g].red = true;
        z = g;
      } else {
        if (z == nodes_[p].left) {
          z = p;
          rotate_right(z);
          p = nodes_[z].parent;
          g = nodes_[p].parent;
        }
        nodes_[p].red = false;
        nodes_[g].red = true;
        rotate_left(g);
      }
    }
  }
  nodes_[root_].red = false;
}

void IntervalTree::remove(const Interval& interval, EntryId id) {
  Index z = find_node(interval);
  if (z == kNil) {
    throw NotFoundError("no interval tree entry " + describe(interval, id));
  }
  auto& payloads = nodes_[z].payloads;
  auto it = std::lower_bound(payloads.begin(), payloads.end(), id);
  if (it == payloads.end() || *it != id) {
    throw NotFoundError("no interval tree entry " + describe(interval, id));
  }
  payloads.erase(it);
  --size_;
  if (payloads.empty()) erase_node(z);
}

void IntervalTree::transplant(Index u, Index v) {
  Index up = nodes_[u].parent;
  if (up == kNil) {
    root_ = v;
  } else if (u == nodes_[up].left) {
    nodes_[up].left = v;
  } else {
    nodes_[up].right = v;
  }
  nodes_[v].parent = up;
}

void IntervalTree::erase_node(Index z) {
  Index y = z;
  bool y_was_red = nodes_[y].red;
  Index x;
  if (nodes_[z].left == kNil) {
    x = nodes_[z].right;
    transplant(z, nodes_[z].right);
  } else if (nodes_[z].right == kNil) {
    x = nodes_[z].left;
    transplant(z, nodes_[z].left);
  } else {
    y = minimum(nodes_[z].right);
    y_was_red = nodes_[y].red;
    x = nodes_[y].right;
    if (nodes_[y].parent == z) {
      nodes_[x].parent = y;
    } else {
      transplant(y, nodes_[y].right);
      nodes_[y].right = nodes_[z].right;
      nodes_[nodes_[y].right].parent = y;
    }
    transplant(z, y);
    nodes_[y].left = nodes_[z].left;
    nodes_[nodes_[y].left].parent = y;
    nodes_[y].red = nodes_[z].red;
  }
  // x.parent is the lowest node whose subtree lost an interval; everything
  // above it, including y in its new position, needs its bounds refreshed.
  pull_to_root(nodes_[x].parent);
  if (!y_was_red) erase_fixup(x);
  nodes_[kNil].parent = kNil;
  release(z);
}

void IntervalTree::erase_fixup(Index x) {
  while (x != root_ && !nodes_[x].red) {
    Index p = nodes_[x].parent;
    if (x == nodes_[p].left) {
      Index w = nodes_[p].right;
      if (nodes_[w].red) {
        nodes_[w].red = false;
        nodes_[p].red = true;
        rotate_left(p);
        w = nodes_[p].right;
      }
      if (!nodes_[nodes_[w].left].red && !nodes_[nodes_[w].right].red) {
        nodes_[w].red = true;
        x = p;
      } else {
        if (!nodes_[nodes_[w].right].red) {
          nodes_[nodes_[w].left].red = false;
          nodes_[w].red = true;
          rotate_right(w);
          w = nodes_[p].right;
        }
        nodes_[w].red = nodes_[p].red;
        nodes_[p].red = false;
        nodes_[nodes_[w].right].red = false;
        rotate_left(p);
        x = root_;
      }
    } else {
      Index w = nodes_[p].left;
      if (nodes_[w].red) {
        nodes_[w].red = false;
        nodes_[p].red = true;
        rotate_right(p);
        w = nodes_[p].left;
      }
      if (!nodes_[nodes_[w].right].red && !nodes_[nodes_[w].left].red) {
        nodes_[w].red = true;
        x = p;
      } else {
        if (!nodes_[nodes_[w].left].red) {
          nodes_[nodes_[w].right].red = false;
          nodes_[w].red = true;
          rotate_left(w);
          w = nodes_[p].left;
        }
        nodes_[w].red = nodes_[p].red;
        nodes_[p].red = false;
        nodes_[nodes_[w].left].red = false;
        rotate_right(p);
        x = root_;
      }
    }
  }
  nodes_[x].red = false;
}

bool IntervalTree::contains(const Interval& interval, EntryId id) const {
  Index x = find_node(interval);
  if (x == kNil) return false;
  const auto& payloads = nodes_[x].payloads;
  return std::binary_search(payloads.begin(), payloads.end(), id);
}

void IntervalTree::search(Index x, AllenRelation rel, const Interval& b, const SearchBox& box,
                          std::vector<TreeEntry>* out, std::size_t& visited) const {
  if (x == kNil) return;
  ++visited;
  const Node& n = nodes_[x];
  if (n.max_end < box.end_lo || n.min_end > box.end_hi) return;

  const Offset ks = n.key.start(), ke = n.key.end();
  // Left keys are canonically smaller: start <= ks, and start == ks implies
  // end < ke. Right keys mirror that.
  const bool left_possible = ks > box.start_lo || (ks == box.start_lo && ke > box.end_lo);
  const bool right_possible = ks < box.start_hi || (ks == box.start_hi && ke < box.end_hi);

  if (left_possible) search(n.left, rel, b, box, out, visited);
  if (holds(rel, n.key, b) && out != nullptr) {
    for (EntryId id : n.payloads) out->push_back(TreeEntry{n.key, id});
  }
  if (right_possible) search(n.right, rel, b, box, out, visited);
}

void IntervalTree::query_into(AllenRelation rel, const Interval& b, std::vector<TreeEntry>& out,
                              QueryStats* stats) const {
  const SearchBox box = SearchBox::make(rel, b);
  std::size_t visited = 0;
  if (!box.empty) search(root_, rel, b, box, &out, visited);
  if (stats != nullptr) stats->visited = visited;
}

std::vector<TreeEntry> IntervalTree::query(AllenRelation rel, const Interval& b,
                                           QueryStats* stats) const {
  std::vector<TreeEntry> out;
  query_into(rel, b, out, stats);
  return out;
}

std::size_t IntervalTree::visited_nodes(AllenRelation rel, const Interval& b) const {
  const SearchBox box = SearchBox::make(rel, b);
  std::size_t visited = 0;
  if (!box.empty) search(root_, rel, b, box, nullptr, visited);
  return visited;
}

bool IntervalTree::scan(Index x, Offset min_start,
                        const std::function<bool(const TreeEntry&)>& visit) const {
  if (x == kNil) return true;
  const Node& n = nodes_[x];
  if (n.key.start() >= min_start) {
    if (!scan(n.left, min_start, visit)) return false;
    for (EntryId id : n.payloads) {
      if (!visit(TreeEntry{n.key, id})) return false;
    }
  }
  return scan(n.right, min_start, visit);
}

void IntervalTree::scan_from(Offset min_start,
                             const std::function<bool(const TreeEntry&)>& visit) const {
  scan(root_, min_start, visit);
}

std::vector<TreeEntry> IntervalTree::entries() const {
  std::vector<TreeEntry> out;
  out.reserve(size_);
  scan_from(0, [&out](const TreeEntry& e) {
    out.push_back(e);
    return true;
  });
  return out;
}

std::optional<NodeSummary> IntervalTree::root() const {
  if (root_ == kNil) return std::nullopt;
  const Node& n = nodes_[root_];
  return NodeSummary{n.key, n.payloads.size(), !n.red, n.min_end, n.max_end};
}

std::optional<std::string> IntervalTree::audit() const {
  std::optional<std::string> problem;
  std::size_t entries = 0;
  std::size_t nodes = 0;
  auto fail = [&problem](const std::string& what, const Interval& key) {
    if (!problem) {
      std::ostringstream os;
      os << what << " at node " << key;
      problem = os.str();
    }
  };

  // Returns black height, or -1 once a violation is recorded.
  std::function<int(Index, const Interval*, const Interval*)> walk =
      [&](Index x, const Interval* lower, const Interval* upper) -> int {
    if (x == kNil) return 1;
    const Node& n = nodes_[x];
    ++nodes;
    entries += n.payloads.size();
    if (n.payloads.empty()) fail("empty payload list", n.key);
    if (!std::is_sorted(n.payloads.begin(), n.payloads.end()) ||
        std::adjacent_find(n.payloads.begin(), n.payloads.end()) != n.payloads.end()) {
      fail("payload list not strictly ascending", n.key);
    }
    if ((lower && !(*lower < n.key)) || (upper && !(n.key < *upper))) {
      fail("canonical order violated", n.key);
    }
    if (n.left != kNil && nodes_[n.left].parent != x) fail("bad parent link", n.key);
    if (n.right != kNil && nodes_[n.right].parent != x) fail("bad parent link", n.key);
    if (n.red && (nodes_[n.left].red || nodes_[n.right].red)) fail("red node with red child", n.key);
    const Offset min_end = std::min({n.key.end(), nodes_[n.left].min_end, nodes_[n.right].min_end});
    const Offset max_end = std::max({n.key.end(), nodes_[n.left].max_end, nodes_[n.right].max_end});
    if (n.min_end != min_end) fail("stale subtree min end", n.key);
    if (n.max_end != max_end) fail("stale subtree max end", n.key);
    const int lh = walk(n.left, lower, &n.key);
    const int rh = walk(n.right, &n.key, upper);
    if (lh < 0 || rh < 0) return -1;
    if (lh != rh) {
      fail("unequal black height", n.key);
      return -1;
    }
    return lh + (n.red ? 0 : 1);
  };

  if (root_ != kNil) {
    if (nodes_[root_].red) fail("red root", nodes_[root_].key);
    if (nodes_[root_].parent != kNil) fail("root has a parent", nodes_[root_].key);
    walk(root_, nullptr, nullptr);
  }
  if (nodes_[kNil].red) problem = problem.value_or("sentinel turned red");
  if (!problem && entries != size_) {
    problem = "entry count " + std::to_string(entries) + " != size " + std::to_string(size_);
  }
  if (!problem && nodes != node_count_) {
    problem = "node count " + std::to_string(nodes) + " != " + std::to_string(node_count_);
  }
  return problem;
}

std::vector<std::vector<TreeEntry>> batch_query_serial(const IntervalTree& tree,
                                                       std::span<const RelationQuery> queries) {
  std::vector<std::vector<TreeEntry>> results(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    tree.query_into(queries[q].rel, queries[q].b, results[q]);
  }
  return results;
}

std::vector<std::vector<TreeEntry>> batch_query(const IntervalTree& tree,
                                                std::span<const RelationQuery> queries) {
  std::vector<std::vector<TreeEntry>> results(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t q = 0; q < n; ++q) {
    tree.query_into(queries[q].rel, queries[q].b, results[q]);
  }
  return results;
}

}  // namespace standoff
