#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "standoff/document.hpp"

namespace standoff {

class CdmStore;

using GraphId = std::int64_t;
using NodeId = std::size_t;

struct GraphEdge {
  NodeId src = 0;
  NodeId dst = 0;
  std::string label;

  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

// Node ids are dense (0..N-1); a node's label is nodes[id]. No self loops,
// and a (src, dst, label) triple appears at most once. In an undirected
// graph (src, dst) and (dst, src) are the same edge.
struct LabeledGraph {
  GraphId id = 0;
  std::string name;
  std::string graph_type;
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;
  bool directed = true;

  NodeId add_node(std::string label);
  // False for a self loop or an edge already present. Throws BoundsError
  // for an unknown endpoint.
  bool add_edge(NodeId src, NodeId dst, std::string label);
  bool has_edge(NodeId src, NodeId dst, std::string_view label) const;
  std::size_t node_count() const noexcept { return nodes.size(); }
  // Throws ValidationError when an invariant above does not hold.
  void validate() const;
};

// node_map[i] is the graph node that pattern node i maps to.
struct SubgraphMapping {
  GraphId graph_id = 0;
  GraphId subgraph_id = 0;
  std::vector<NodeId> node_map;

  friend bool operator==(const SubgraphMapping&, const SubgraphMapping&) = default;
};

// Attributes of a dependency annotation: the head token span; the
// annotation's own value is the relation label.
inline constexpr const char* kHeadStart = "head_start";
inline constexpr const char* kHeadEnd = "head_end";
inline constexpr const char* kDepStart = "dep_start";
inline constexpr const char* kDepEnd = "dep_end";
inline constexpr const char* kDependencyGraphType = "dependency";

struct DependencyGraphResult {
  LabeledGraph graph;
  // Graph node of every sentence token, in token order.
  std::vector<NodeId> token_nodes;
  std::size_t skipped_dependencies = 0;
};

// Nodes are concepts and the tokens outside every concept. A token inside
// several concepts joins the longest (then leftmost) one, and a concept
// left without tokens gets no node. Edges run head -> dependent.
DependencyGraphResult build_dependency_graph(const Document& doc, const Annotation& sentence,
                                             std::span<const Annotation* const> dependencies,
                                             std::span<const Annotation* const> concepts);

// Every injective, label and direction preserving map of sg into g (sg
// edges must exist in g; g may have more). Maps with the same image (same
// nodes and edges of g) are reported once, keeping the smallest node_map.
std::vector<SubgraphMapping> find_subgraph_occurrences(const LabeledGraph& g, const LabeledGraph& sg);

// Same label multiset and edge structure under some node bijection.
bool is_isomorphic(const LabeledGraph& a, const LabeledGraph& b);

// Minimal encoding over every node order that keeps labels sorted. Equal
// for two graphs exactly when they are isomorphic.
std::string canonical_code(const LabeledGraph& g);
// The graph with its nodes renumbered into canonical order.
LabeledGraph canonical_form(const LabeledGraph& g);

struct MinedPattern {
  LabeledGraph pattern;  // canonical node order
  std::string code;
  std::size_t support = 0;
  std::vector<std::size_t> members;  // positions in the input list, ascending
};

struct MiningOptions {
  std::size_t min_support = 1;
  std::size_t max_nodes = 4;
  bool parallel = true;
};

// Connected patterns with at most max_nodes nodes found in at least
// min_support graphs (one count per graph). Ordered by node count, then
// code. Throws ValidationError for a zero threshold.
std::vector<MinedPattern> mine_frequent_subgraphs(std::span<const LabeledGraph> graphs,
                                                  const MiningOptions& options);

// --- persistence -------------------------------------------------------
// Writes graphs + linkage_graph rows and sets g.id.
GraphId persist_graph(CdmStore& store, LabeledGraph& g);
LabeledGraph load_graph(CdmStore& store, GraphId id);
std::vector<GraphId> list_graphs(CdmStore& store, std::string_view graph_type = {});

struct StoredPattern {
  std::int64_t id = 0;  // sig_subgraph row
  LabeledGraph pattern;
  std::size_t support = 0;
};

// One sig_subgraph row per pattern (its graph stored under type
// "sig_subgraph") and lg_sigsub rows for every occurrence in each member.
// `graphs` must be the mining input, already persisted. Returns the
// sig_subgraph ids.
std::vector<std::int64_t> persist_mining_results(CdmStore& store,
                                                 std::span<const LabeledGraph> graphs,
                                                 std::span<const MinedPattern> patterns);
std::vector<StoredPattern> load_patterns(CdmStore& store);
std::vector<SubgraphMapping> load_mappings(CdmStore& store, std::int64_t sig_subgraph_id);

// --- interchange file --------------------------------------------------
//   graph<TAB>id<TAB>name<TAB>type[<TAB>undirected]
//   n<TAB>node id<TAB>label
//   e<TAB>src<TAB>dst<TAB>label
// Blank lines and '#' lines are ignored. Node ids may be any distinct
// integers; they are renumbered in order of appearance.
void write_graphs(std::ostream& out, std::span<const LabeledGraph> graphs);
std::vector<LabeledGraph> read_graphs(std::istream& in);

}  // namespace standoff
