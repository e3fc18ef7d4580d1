#include "standoff/graph_tools.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "standoff/cdm_store.hpp"
#include "standoff/errors.hpp"
#include "standoff/sqlite.hpp"
#include "standoff/utf8.hpp"

namespace standoff {

namespace {

using PairKey = std::pair<NodeId, NodeId>;

PairKey pair_key(NodeId a, NodeId b, bool directed) {
  if (!directed && b < a) std::swap(a, b);
  return {a, b};
}

using Adjacency = std::map<PairKey, std::set<std::string>>;

Adjacency adjacency(const LabeledGraph& g) {
  Adjacency adj;
  for (const auto& e : g.edges) adj[pair_key(e.src, e.dst, g.directed)].insert(e.label);
  return adj;
}

}  // namespace

NodeId LabeledGraph::add_node(std::string label) {
  nodes.push_back(std::move(label));
  return nodes.size() - 1;
}

bool LabeledGraph::has_edge(NodeId src, NodeId dst, std::string_view label) const {
  const auto key = pair_key(src, dst, directed);
  return std::any_of(edges.begin(), edges.end(), [&](const GraphEdge& e) {
    return pair_key(e.src, e.dst, directed) == key && e.label == label;
  });
}

bool LabeledGraph::add_edge(NodeId src, NodeId dst, std::string label) {
  if (src >= nodes.size() || dst >= nodes.size()) {
    throw BoundsError("edge endpoint " + std::to_string(std::max(src, dst)) + " is not a node");
  }
  if (src == dst || has_edge(src, dst, label)) return false;
  edges.push_back({src, dst, std::move(label)});
  return true;
}

void LabeledGraph::validate() const {
  std::set<std::tuple<NodeId, NodeId, std::string>> seen;
  for (const auto& e : edges) {
    if (e.src >= nodes.size() || e.dst >= nodes.size()) {
      throw ValidationError("graph '" + name + "': edge endpoint outside the node range");
    }
    if (e.src == e.dst) throw ValidationError("graph '" + name + "': self loop on node " + std::to_string(e.src));
    const auto [a, b] = pair_key(e.src, e.dst, directed);
    if (!seen.emplace(a, b, e.label).second) {
      throw ValidationError("graph '" + name + "': duplicate edge " + std::to_string(a) + "->" +
                            std::to_string(b) + " " + e.label);
    }
  }
}

// --- dependency graphs ----------------------------------------------------

namespace {

std::optional<Offset> offset_attribute(const Annotation& a, const char* key) {
  const auto it = a.attributes.find(key);
  if (it == a.attributes.end()) return std::nullopt;
  Offset v = 0;
  const auto* first = it->second.data();
  const auto* last = first + it->second.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

std::optional<Interval> span_attribute(const Annotation& a, const char* start, const char* end) {
  const auto s = offset_attribute(a, start);
  const auto e = offset_attribute(a, end);
  if (!s || !e || *s > *e) return std::nullopt;
  return Interval(*s, *e);
}

}  // namespace

DependencyGraphResult build_dependency_graph(const Document& doc, const Annotation& sentence,
                                             std::span<const Annotation* const> dependencies,
                                             std::span<const Annotation* const> concepts) {
  DependencyGraphResult out;
  out.graph.name = doc.name() + "#" + std::to_string(sentence.span.start());
  out.graph.graph_type = kDependencyGraphType;

  const auto tokens = doc.index().within(sentence.span, types::kToken);
  std::map<Interval, std::size_t> token_at;
  std::map<const Annotation*, NodeId> concept_node;
  out.token_nodes.reserve(tokens.size());

  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Interval& span = tokens[t]->span;
    token_at.emplace(span, t);
    const Annotation* owner = nullptr;
    for (const Annotation* c : concepts) {
      if (c->span.start() > span.start() || span.end() > c->span.end()) continue;
      if (!owner || c->span.length() > owner->span.length() ||
          (c->span.length() == owner->span.length() &&
           std::tie(c->span, c->id) < std::tie(owner->span, owner->id))) {
        owner = c;
      }
    }
    if (!owner) {
      out.token_nodes.push_back(out.graph.add_node(fold_case(doc.text(span))));
      continue;
    }
    auto [it, fresh] = concept_node.emplace(owner, 0);
    if (fresh) it->second = out.graph.add_node(owner->value);
    out.token_nodes.push_back(it->second);
  }

  for (const Annotation* dep : dependencies) {
    const auto head = span_attribute(*dep, kHeadStart, kHeadEnd);
    auto dependent = span_attribute(*dep, kDepStart, kDepEnd);
    if (!dependent && dep->attributes.count(kDepStart) == 0) dependent = dep->span;
    const auto h = head ? token_at.find(*head) : token_at.end();
    const auto d = dependent ? token_at.find(*dependent) : token_at.end();
    if (h == token_at.end() || d == token_at.end()) {
      ++out.skipped_dependencies;
      continue;
    }
    // Merging can turn an edge into a self loop or a repeat; add_edge drops both.
    out.graph.add_edge(out.token_nodes[h->second], out.token_nodes[d->second], dep->value);
  }
  return out;
}

// --- matching ---------------------------------------------------------------

namespace {

class Matcher {
 public:
  Matcher(const LabeledGraph& g, const LabeledGraph& sg) : g_(g), sg_(sg), g_adj_(adjacency(g)) {
    // Grow the match along edges so adjacency constraints bite early.
    std::vector<std::vector<NodeId>> neighbours(sg.nodes.size());
    incident_.resize(sg.nodes.size());
    for (std::size_t i = 0; i < sg.edges.size(); ++i) {
      const auto& e = sg.edges[i];
      neighbours[e.src].push_back(e.dst);
      neighbours[e.dst].push_back(e.src);
      incident_[e.src].push_back(i);
      incident_[e.dst].push_back(i);
    }
    std::vector<bool> seen(sg.nodes.size(), false);
    for (NodeId root = 0; root < sg.nodes.size(); ++root) {
      if (seen[root]) continue;
      seen[root] = true;
      std::size_t head = order_.size();
      order_.push_back(root);
      while (head < order_.size()) {
        for (NodeId n : neighbours[order_[head++]]) {
          if (!seen[n]) {
            seen[n] = true;
            order_.push_back(n);
          }
        }
      }
    }
    position_.assign(sg.nodes.size(), 0);
    for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;
  }

  template <typename Visit>
  void run(Visit&& visit) {
    map_.assign(sg_.nodes.size(), 0);
    used_.assign(g_.nodes.size(), false);
    extend(0, visit);
  }

 private:
  template <typename Visit>
  void extend(std::size_t pos, Visit& visit) {
    if (pos == order_.size()) {
      visit(map_);
      return;
    }
    const NodeId u = order_[pos];
    for (NodeId x = 0; x < g_.nodes.size(); ++x) {
      if (used_[x] || g_.nodes[x] != sg_.nodes[u]) continue;
      map_[u] = x;
      if (!consistent(u, pos)) continue;
      used_[x] = true;
      extend(pos + 1, visit);
      used_[x] = false;
    }
  }

  bool consistent(NodeId u, std::size_t pos) const {
    for (std::size_t i : incident_[u]) {
      const auto& e = sg_.edges[i];
      const NodeId other = e.src == u ? e.dst : e.src;
      if (position_[other] > pos) continue;
      const auto it = g_adj_.find(pair_key(map_[e.src], map_[e.dst], g_.directed));
      if (it == g_adj_.end() || it->second.count(e.label) == 0) return false;
    }
    return true;
  }

  const LabeledGraph& g_;
  const LabeledGraph& sg_;
  Adjacency g_adj_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<NodeId> order_;
  std::vector<std::size_t> position_;
  std::vector<NodeId> map_;
  std::vector<bool> used_;
};

using Image = std::pair<std::vector<NodeId>, std::vector<std::tuple<NodeId, NodeId, std::string>>>;

Image image_of(const LabeledGraph& g, const LabeledGraph& sg, const std::vector<NodeId>& m) {
  Image img;
  img.first = m;
  std::sort(img.first.begin(), img.first.end());
  for (const auto& e : sg.edges) {
    const auto [a, b] = pair_key(m[e.src], m[e.dst], g.directed);
    img.second.emplace_back(a, b, e.label);
  }
  std::sort(img.second.begin(), img.second.end());
  return img;
}

void require_same_direction(const LabeledGraph& a, const LabeledGraph& b) {
  if (a.directed != b.directed) {
    throw ValidationError("cannot match a directed graph against an undirected one");
  }
}

}  // namespace

std::vector<SubgraphMapping> find_subgraph_occurrences(const LabeledGraph& g, const LabeledGraph& sg) {
  require_same_direction(g, sg);
  if (sg.nodes.size() > g.nodes.size() || sg.nodes.empty()) return {};
  std::map<Image, std::vector<NodeId>> best;
  Matcher(g, sg).run([&](const std::vector<NodeId>& m) {
    auto [it, fresh] = best.emplace(image_of(g, sg, m), m);
    if (!fresh && m < it->second) it->second = m;
  });
  std::vector<SubgraphMapping> out;
  out.reserve(best.size());
  for (auto& [img, m] : best) out.push_back({g.id, sg.id, std::move(m)});
  std::sort(out.begin(), out.end(),
            [](const SubgraphMapping& a, const SubgraphMapping& b) { return a.node_map < b.node_map; });
  return out;
}

bool is_isomorphic(const LabeledGraph& a, const LabeledGraph& b) {
  if (a.directed != b.directed || a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) {
    return false;
  }
  // A monomorphism between graphs with equal node and edge counts is onto.
  bool found = false;
  if (a.nodes.empty()) return true;
  Matcher(b, a).run([&](const std::vector<NodeId>&) { found = true; });
  return found;
}

// --- canonical code -------------------------------------------------------

namespace {

void escape_into(std::string& out, std::string_view label) {
  for (char c : label) {
    if (c == '\\' || c == ',' || c == ';' || c == '|' || c == ':' || c == '>') out.push_back('\\');
    out.push_back(c);
  }
}

struct Canonical {
  std::string code;
  std::vector<NodeId> order;  // order[new id] = old id
};

Canonical canonicalize(const LabeledGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<NodeId> by_label(n);
  for (NodeId i = 0; i < n; ++i) by_label[i] = i;
  std::stable_sort(by_label.begin(), by_label.end(),
                   [&](NodeId a, NodeId b) { return g.nodes[a] < g.nodes[b]; });

  std::string prefix = g.directed ? "d" : "u";
  prefix += std::to_string(n) + "|";
  for (NodeId i : by_label) {
    escape_into(prefix, g.nodes[i]);
    prefix.push_back(',');
  }
  prefix.push_back('|');

  Canonical best;
  bool have = false;
  std::vector<NodeId> order(n), inv(n);
  std::vector<bool> used(n, false);
  std::vector<std::tuple<NodeId, NodeId, const std::string*>> coded;

  auto finish = [&] {
    for (NodeId i = 0; i < n; ++i) inv[order[i]] = i;
    coded.clear();
    for (const auto& e : g.edges) {
      const auto [a, b] = pair_key(inv[e.src], inv[e.dst], g.directed);
      coded.emplace_back(a, b, &e.label);
    }
    std::sort(coded.begin(), coded.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x), *std::get<2>(x)) <
             std::tie(std::get<0>(y), std::get<1>(y), *std::get<2>(y));
    });
    std::string code = prefix;
    for (const auto& [a, b, l] : coded) {
      code += std::to_string(a) + ">" + std::to_string(b) + ":";
      escape_into(code, *l);
      code.push_back(';');
    }
    if (!have || code < best.code) {
      best.code = std::move(code);
      best.order = order;
      have = true;
    }
  };

  // Fill position by position, only with nodes carrying the label that
  // belongs there in sorted order.
  auto fill = [&](auto&& self, std::size_t pos) -> void {
    if (pos == n) {
      finish();
      return;
    }
    const std::string& want = g.nodes[by_label[pos]];
    for (NodeId v = 0; v < n; ++v) {
      if (used[v] || g.nodes[v] != want) continue;
      used[v] = true;
      order[pos] = v;
      self(self, pos + 1);
      used[v] = false;
    }
  };
  fill(fill, 0);
  if (!have) finish();
  return best;
}

LabeledGraph reorder(const LabeledGraph& g, const std::vector<NodeId>& order) {
  LabeledGraph out;
  out.id = g.id;
  out.name = g.name;
  out.graph_type = g.graph_type;
  out.directed = g.directed;
  std::vector<NodeId> inv(order.size());
  for (NodeId i = 0; i < order.size(); ++i) {
    inv[order[i]] = i;
    out.nodes.push_back(g.nodes[order[i]]);
  }
  for (const auto& e : g.edges) {
    auto [a, b] = pair_key(inv[e.src], inv[e.dst], g.directed);
    out.edges.push_back({a, b, e.label});
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace

std::string canonical_code(const LabeledGraph& g) { return canonicalize(g).code; }

LabeledGraph canonical_form(const LabeledGraph& g) { return reorder(g, canonicalize(g).order); }

// --- mining -----------------------------------------------------------------

namespace {

struct Candidate {
  LabeledGraph graph;
  std::set<std::size_t> members;
};

using CandidateMap = std::map<std::string, Candidate>;

void record(CandidateMap& into, LabeledGraph&& g, std::size_t member) {
  auto code = canonical_code(g);
  auto it = into.find(code);
  if (it == into.end()) it = into.emplace(std::move(code), Candidate{std::move(g), {}}).first;
  it->second.members.insert(member);
}

// Every pattern obtained by adding one graph edge next to an occurrence of
// p, in each graph that contains p.
CandidateMap extend(const MinedPattern& p, std::span<const LabeledGraph> graphs, std::size_t max_nodes) {
  CandidateMap out;
  for (std::size_t gi : p.members) {
    const LabeledGraph& g = graphs[gi];
    for (const auto& occ : find_subgraph_occurrences(g, p.pattern)) {
      std::map<NodeId, NodeId> inverse;
      for (NodeId i = 0; i < occ.node_map.size(); ++i) inverse[occ.node_map[i]] = i;
      std::set<std::tuple<NodeId, NodeId, std::string>> used;
      for (const auto& e : p.pattern.edges) {
        const auto [a, b] = pair_key(occ.node_map[e.src], occ.node_map[e.dst], g.directed);
        used.emplace(a, b, e.label);
      }
      for (const auto& e : g.edges) {
        const auto [a, b] = pair_key(e.src, e.dst, g.directed);
        if (used.count({a, b, e.label})) continue;
        const auto s = inverse.find(e.src);
        const auto d = inverse.find(e.dst);
        const bool has_s = s != inverse.end();
        const bool has_d = d != inverse.end();
        if (!has_s && !has_d) continue;
        LabeledGraph ext = p.pattern;
        if (has_s && has_d) {
          ext.edges.push_back({s->second, d->second, e.label});
        } else {
          if (ext.nodes.size() >= max_nodes) continue;
          const NodeId fresh = ext.add_node(g.nodes[has_s ? e.dst : e.src]);
          ext.edges.push_back({has_s ? s->second : fresh, has_d ? d->second : fresh, e.label});
        }
        record(out, std::move(ext), gi);
      }
    }
  }
  return out;
}

MinedPattern finish(const std::string& code, Candidate&& c) {
  MinedPattern p;
  p.pattern = canonical_form(c.graph);
  p.pattern.name = "pattern";
  p.pattern.graph_type = "sig_subgraph";
  p.code = code;
  p.support = c.members.size();
  p.members.assign(c.members.begin(), c.members.end());
  return p;
}

}  // namespace

std::vector<MinedPattern> mine_frequent_subgraphs(std::span<const LabeledGraph> graphs,
                                                  const MiningOptions& options) {
  if (options.min_support == 0) throw ValidationError("min_support must be at least 1");
  if (options.max_nodes == 0) throw ValidationError("max_nodes must be at least 1");
  std::vector<MinedPattern> result;
  if (graphs.empty()) return result;
  for (const auto& g : graphs) {
    require_same_direction(g, graphs.front());
    g.validate();
  }

  CandidateMap singles;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (const auto& label : graphs[gi].nodes) {
      LabeledGraph one;
      one.directed = graphs[gi].directed;
      one.add_node(label);
      record(singles, std::move(one), gi);
    }
  }
  std::vector<MinedPattern> level;
  for (auto& [code, c] : singles) {
    if (c.members.size() >= options.min_support) level.push_back(finish(code, std::move(c)));
  }

  // Each round adds one edge. Every connected pattern with k+1 edges has a
  // connected sub-pattern with k edges, and a graph containing it contains
  // that sub-pattern, so growing only frequent patterns loses nothing.
  while (!level.empty()) {
    result.insert(result.end(), level.begin(), level.end());
    std::vector<CandidateMap> partial(level.size());
    const auto n = static_cast<std::ptrdiff_t>(level.size());
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n; ++i) partial[i] = extend(level[i], graphs, options.max_nodes);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) partial[i] = extend(level[i], graphs, options.max_nodes);
    }
    CandidateMap merged;
    for (auto& part : partial) {
      for (auto& [code, c] : part) {
        auto it = merged.find(code);
        if (it == merged.end()) {
          merged.emplace(code, std::move(c));
        } else {
          it->second.members.insert(c.members.begin(), c.members.end());
        }
      }
    }
    level.clear();
    for (auto& [code, c] : merged) {
      if (c.members.size() >= options.min_support) level.push_back(finish(code, std::move(c)));
    }
  }

  std::sort(result.begin(), result.end(), [](const MinedPattern& a, const MinedPattern& b) {
    return std::forward_as_tuple(a.pattern.nodes.size(), a.code) <
           std::forward_as_tuple(b.pattern.nodes.size(), b.code);
  });
  return result;
}

// --- persistence --------------------------------------------------------------

namespace {

std::string dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

GraphId insert_graph(sql::Connection& conn, LabeledGraph& g) {
  g.validate();
  nlohmann::json data = {{"directed", g.directed}, {"nodes", g.nodes}};
  sql::Statement ins(conn, "INSERT INTO graphs(name, type, data) VALUES (?, ?, ?)");
  ins.bind(1, g.name).bind(2, g.graph_type).bind(3, dump(data)).run();
  g.id = conn.last_insert_rowid();
  sql::Statement edge(conn,
                      "INSERT INTO linkage_graph(graph_id, node1, node2, edge_label, node1_label, node2_label) "
                      "VALUES (?, ?, ?, ?, ?, ?)");
  for (const auto& e : g.edges) {
    edge.bind(1, g.id)
        .bind(2, static_cast<std::int64_t>(e.src))
        .bind(3, static_cast<std::int64_t>(e.dst))
        .bind(4, e.label)
        .bind(5, g.nodes[e.src])
        .bind(6, g.nodes[e.dst]);
    edge.run();
    edge.reset();
  }
  return g.id;
}

}  // namespace

GraphId persist_graph(CdmStore& store, LabeledGraph& g) {
  sql::Transaction tx(store.connection());
  insert_graph(store.connection(), g);
  tx.commit();
  return g.id;
}

LabeledGraph load_graph(CdmStore& store, GraphId id) {
  auto& conn = store.connection();
  sql::Statement head(conn, "SELECT name, type, data FROM graphs WHERE id = ?");
  head.bind(1, id);
  if (!head.step()) throw NotFoundError("no graph with id " + std::to_string(id));
  LabeledGraph g;
  g.id = id;
  g.name = head.column_text(0);
  g.graph_type = head.column_text(1);
  const auto data = nlohmann::json::parse(head.column_text(2), nullptr, false);
  const bool has_nodes = data.is_object() && data.contains("nodes") && data["nodes"].is_array();
  if (data.is_object() && data.contains("directed") && data["directed"].is_boolean()) {
    g.directed = data["directed"].get<bool>();
  }
  if (has_nodes) {
    for (const auto& n : data["nodes"]) g.nodes.push_back(n.is_string() ? n.get<std::string>() : n.dump());
  }

  sql::Statement rows(conn,
                      "SELECT node1, node2, edge_label, node1_label, node2_label FROM linkage_graph "
                      "WHERE graph_id = ? ORDER BY rowid");
  rows.bind(1, id);
  while (rows.step()) {
    const auto a = static_cast<NodeId>(rows.column_int(0));
    const auto b = static_cast<NodeId>(rows.column_int(1));
    if (!has_nodes) {
      // Rows written by other tools: node labels come from the edge rows.
      const auto need = std::max(a, b) + 1;
      if (g.nodes.size() < need) g.nodes.resize(need);
      g.nodes[a] = rows.column_text(3);
      g.nodes[b] = rows.column_text(4);
    }
    g.edges.push_back({a, b, rows.column_text(2)});
  }
  g.validate();
  return g;
}

std::vector<GraphId> list_graphs(CdmStore& store, std::string_view graph_type) {
  std::vector<GraphId> out;
  if (graph_type.empty()) {
    sql::Statement st(store.connection(), "SELECT id FROM graphs ORDER BY id");
    while (st.step()) out.push_back(st.column_int(0));
  } else {
    sql::Statement st(store.connection(), "SELECT id FROM graphs WHERE type = ? ORDER BY id");
    st.bind(1, graph_type);
    while (st.step()) out.push_back(st.column_int(0));
  }
  return out;
}

std::vector<std::int64_t> persist_mining_results(CdmStore& store, std::span<const LabeledGraph> graphs,
                                                 std::span<const MinedPattern> patterns) {
  auto& conn = store.connection();
  sql::Transaction tx(conn);
  std::vector<std::int64_t> ids;
  sql::Statement sig(conn, "INSERT INTO sig_subgraph(subgraph_graph_id, support, data) VALUES (?, ?, ?)");
  sql::Statement link(conn, "INSERT INTO lg_sigsub(graph_id, sig_subgraph_id, node_mapping) VALUES (?, ?, ?)");
  for (const auto& p : patterns) {
    LabeledGraph pg = p.pattern;
    pg.id = 0;
    insert_graph(conn, pg);
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t m : p.members) {
      if (m >= graphs.size()) throw BoundsError("pattern member " + std::to_string(m) + " is not an input graph");
      members.push_back(graphs[m].id);
    }
    sig.bind(1, pg.id)
        .bind(2, static_cast<std::int64_t>(p.support))
        .bind(3, dump({{"code", p.code}, {"members", members}}));
    sig.run();
    sig.reset();
    const auto sig_id = conn.last_insert_rowid();
    ids.push_back(sig_id);
    for (std::size_t m : p.members) {
      for (const auto& occ : find_subgraph_occurrences(graphs[m], p.pattern)) {
        link.bind(1, graphs[m].id).bind(2, sig_id).bind(3, dump(occ.node_map));
        link.run();
        link.reset();
      }
    }
  }
  tx.commit();
  return ids;
}

std::vector<StoredPattern> load_patterns(CdmStore& store) {
  std::vector<std::tuple<std::int64_t, GraphId, std::size_t>> rows;
  {
    sql::Statement st(store.connection(), "SELECT id, subgraph_graph_id, support FROM sig_subgraph ORDER BY id");
    while (st.step()) {
      rows.emplace_back(st.column_int(0), st.column_int(1), static_cast<std::size_t>(st.column_int(2)));
    }
  }
  std::vector<StoredPattern> out;
  for (const auto& [id, graph, support] : rows) out.push_back({id, load_graph(store, graph), support});
  return out;
}

std::vector<SubgraphMapping> load_mappings(CdmStore& store, std::int64_t sig_subgraph_id) {
  sql::Statement st(store.connection(),
                    "SELECT graph_id, node_mapping FROM lg_sigsub WHERE sig_subgraph_id = ? ORDER BY rowid");
  st.bind(1, sig_subgraph_id);
  std::vector<SubgraphMapping> out;
  while (st.step()) {
    const auto text = st.column_text(1);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_array()) throw ParseError("lg_sigsub: node_mapping is not a list: " + text, 0, 0);
    SubgraphMapping m{st.column_int(0), sig_subgraph_id, {}};
    for (const auto& v : j) {
      if (!v.is_number_unsigned()) throw ParseError("lg_sigsub: bad node id in " + text, 0, 0);
      m.node_map.push_back(v.get<NodeId>());
    }
    out.push_back(std::move(m));
  }
  return out;
}

// --- interchange file -------------------------------------------------------

namespace {

void check_field(std::string_view s) {
  if (s.find_first_of("\t\n\r") != std::string_view::npos) {
    throw ValidationError("graph field contains a tab or newline: " + std::string(s));
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(s) + "'", line, 0);
  }
  return v;
}

}  // namespace

void write_graphs(std::ostream& out, std::span<const LabeledGraph> graphs) {
  for (const auto& g : graphs) {
    g.validate();
    check_field(g.name);
    check_field(g.graph_type);
    out << "graph\t" << g.id << '\t' << g.name << '\t' << g.graph_type;
    if (!g.directed) out << "\tundirected";
    out << '\n';
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
      check_field(g.nodes[i]);
      out << "n\t" << i << '\t' << g.nodes[i] << '\n';
    }
    for (const auto& e : g.edges) {
      check_field(e.label);
      out << "e\t" << e.src << '\t' << e.dst << '\t' << e.label << '\n';
    }
  }
}

std::vector<LabeledGraph> read_graphs(std::istream& in) {
  std::vector<LabeledGraph> out;
  std::map<std::int64_t, NodeId> ids;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError("line " + std::to_string(lineno) + ": " + msg, lineno, 0);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f[0] == "graph") {
      if (f.size() != 4 && f.size() != 5) throw fail("graph line needs id, name and type");
      LabeledGraph g;
      g.id = parse_number<std::int64_t>(f[1], lineno, "graph id");
      g.name = f[2];
      g.graph_type = f[3];
      if (f.size() == 5) {
        if (f[4] == "undirected") {
          g.directed = false;
        } else if (f[4] != "directed") {
          throw fail("unknown graph flag '" + std::string(f[4]) + "'");
        }
      }
      out.push_back(std::move(g));
      ids.clear();
      continue;
    }
    if (out.empty()) throw fail("'" + std::string(f[0]) + "' line before any graph line");
    LabeledGraph& g = out.back();
    if (f[0] == "n") {
      if (f.size() != 3) throw fail("node line needs id and label");
      const auto id = parse_number<std::int64_t>(f[1], lineno, "node id");
      if (!ids.emplace(id, g.nodes.size()).second) throw fail("node " + std::string(f[1]) + " defined twice");
      g.add_node(std::string(f[2]));
    } else if (f[0] == "e") {
      if (f.size() != 4) throw fail("edge line needs src, dst and label");
      const auto s = ids.find(parse_number<std::int64_t>(f[1], lineno, "node id"));
      const auto d = ids.find(parse_number<std::int64_t>(f[2], lineno, "node id"));
      if (s == ids.end() || d == ids.end()) throw fail("edge refers to an undefined node");
      if (s->second == d->second) throw fail("self loop");
      if (!g.add_edge(s->second, d->second, std::string(f[3]))) throw fail("duplicate edge");
    } else {
      throw fail("unknown record type '" + std::string(f[0]) + "'");
    }
  }
  return out;
}

}  // namespace standoff
