#pragma once

// Exhaustive graph references: isomorphism by trying every bijection and
// pattern enumeration over every edge subset. Used only by tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "standoff/graph_tools.hpp"

namespace standoff::testing {

using EdgeSet = std::set<std::tuple<NodeId, NodeId, std::string>>;

inline EdgeSet edge_set(const LabeledGraph& g, const std::vector<NodeId>& relabel) {
  EdgeSet s;
  for (const auto& e : g.edges) s.emplace(relabel[e.src], relabel[e.dst], e.label);
  return s;
}

inline std::vector<NodeId> identity(std::size_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Isomorphism by trying every bijection.
inline bool brute_isomorphic(const LabeledGraph& a, const LabeledGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  const auto target = edge_set(b, identity(b.nodes.size()));
  auto p = identity(a.nodes.size());
  do {
    bool labels = true;
    for (NodeId i = 0; i < p.size() && labels; ++i) labels = a.nodes[i] == b.nodes[p[i]];
    if (labels && edge_set(a, p) == target) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

inline LabeledGraph random_graph(std::mt19937& rng, std::size_t max_nodes, std::size_t max_edges,
                          const std::vector<std::string>& labels) {
  LabeledGraph g;
  const std::size_t n = 1 + rng() % max_nodes;
  for (std::size_t i = 0; i < n; ++i) g.add_node(labels[rng() % labels.size()]);
  if (n > 1) {
    const std::size_t m = rng() % (max_edges + 1);
    for (std::size_t k = 0; k < m; ++k) {
      g.add_edge(rng() % n, rng() % n, rng() % 2 ? "x" : "y");
    }
  }
  return g;
}

// Every connected sub-pattern of every graph, grouped by brute-force
// isomorphism, with the set of graphs holding it.
struct OracleClass {
  LabeledGraph pattern;
  std::set<std::size_t> graphs;
};

inline std::vector<OracleClass> oracle_patterns(const std::vector<LabeledGraph>& graphs, std::size_t max_nodes) {
  std::vector<OracleClass> classes;
  auto add = [&](LabeledGraph p, std::size_t gi) {
    for (auto& c : classes) {
      if (brute_isomorphic(c.pattern, p)) {
        c.graphs.insert(gi);
        return;
      }
    }
    classes.push_back({std::move(p), {gi}});
  };
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    for (const auto& label : g.nodes) {
      LabeledGraph one;
      one.add_node(label);
      add(one, gi);
    }
    const std::size_t m = g.edges.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      std::vector<NodeId> remap(g.nodes.size(), SIZE_MAX);
      LabeledGraph p;
      for (std::size_t k = 0; k < m; ++k) {
        if (!(mask >> k & 1)) continue;
        for (NodeId v : {g.edges[k].src, g.edges[k].dst}) {
          if (remap[v] == SIZE_MAX) remap[v] = p.add_node(g.nodes[v]);
        }
        p.add_edge(remap[g.edges[k].src], remap[g.edges[k].dst], g.edges[k].label);
      }
      if (p.nodes.size() > max_nodes) continue;
      // connectivity by union-find
      std::vector<NodeId> parent = identity(p.nodes.size());
      auto find = [&](NodeId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (const auto& e : p.edges) parent[find(e.src)] = find(e.dst);
      bool connected = true;
      for (NodeId v = 0; v < p.nodes.size(); ++v) connected = connected && find(v) == find(0);
      if (connected) add(std::move(p), gi);
    }
  }
  return classes;
}

}  // namespace standoff::testing
