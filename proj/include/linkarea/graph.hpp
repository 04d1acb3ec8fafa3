#pragma once

// Linkage graphs, two-terminal series-parallel decomposition, partial two-tree
// recognition and the decompositions of a graph relative to a distinguished cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linkarea/errors.hpp"

namespace linkarea {

using VertexId = std::string;

struct Edge {
  VertexId u;
  VertexId v;
  double length = 0.0;
};

/// Connected multigraph with positive edge lengths. Parallel edges are kept.
class LinkageGraph {
 public:
  LinkageGraph() = default;

  LinkageGraph(std::vector<VertexId> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (vertices_.empty()) detail::fail(ErrorKind::InvalidInput, "linkage has no vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!index_.emplace(vertices_[i], i).second)
        detail::fail(ErrorKind::InvalidInput, "duplicate vertex id '" + vertices_[i] + "'");
    }
    incident_.resize(vertices_.size());
    ends_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Edge& edge = edges_[e];
      auto iu = index_.find(edge.u);
      auto iv = index_.find(edge.v);
      if (iu == index_.end() || iv == index_.end())
        detail::fail(ErrorKind::InvalidInput, "edge " + std::to_string(e) + " uses an unknown vertex");
      if (iu->second == iv->second)
        detail::fail(ErrorKind::InvalidInput, "self-loop at vertex '" + edge.u + "'");
      if (!(edge.length > 0.0) || !std::isfinite(edge.length))
        detail::fail(ErrorKind::InvalidInput, "edge " + std::to_string(e) + " has non-positive length");
      ends_.emplace_back(iu->second, iv->second);
      incident_[iu->second].push_back(e);
      incident_[iv->second].push_back(e);
    }
    if (!connected()) detail::fail(ErrorKind::InvalidInput, "linkage graph is not connected");
  }

  const std::vector<VertexId>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(const VertexId& v) const { return index_.count(v) != 0; }

  std::size_t index_of(const VertexId& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) detail::fail(ErrorKind::InvalidInput, "unknown vertex '" + v + "'");
    return it->second;
  }

  std::size_t source(std::size_t e) const { return ends_.at(e).first; }
  std::size_t target(std::size_t e) const { return ends_.at(e).second; }
  std::size_t other_end(std::size_t e, std::size_t vertex) const {
    return ends_.at(e).first == vertex ? ends_[e].second : ends_[e].first;
  }
  const std::vector<std::size_t>& incident(std::size_t vertex) const { return incident_.at(vertex); }
  std::size_t degree(std::size_t vertex) const { return incident_.at(vertex).size(); }

  double total_length() const {
    return std::accumulate(edges_.begin(), edges_.end(), 0.0,
                           [](double s, const Edge& e) { return s + e.length; });
  }

  /// Lowest-index edge joining a and b that is not in `skip`.
  std::optional<std::size_t> find_edge(const VertexId& a, const VertexId& b,
                                       const std::set<std::size_t>& skip = {}) const {
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    for (std::size_t e : incident_[ia]) {
      if (other_end(e, ia) == ib && !skip.count(e)) return e;
    }
    return std::nullopt;
  }

  LinkageGraph with_length(std::size_t e, double length) const {
    std::vector<Edge> edges = edges_;
    edges.at(e).length = length;
    return LinkageGraph(vertices_, std::move(edges));
  }

 private:
  bool connected() const {
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t e : incident_[x]) {
        const std::size_t y = other_end(e, x);
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == vertices_.size();
  }

  std::vector<VertexId> vertices_;
  std::vector<Edge> edges_;
  std::map<VertexId, std::size_t> index_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Subgraph spanned by a set of edges of `g`; vertex order follows `g`.
inline LinkageGraph edge_subgraph(const LinkageGraph& g, const std::vector<std::size_t>& edge_ids) {
  std::set<std::size_t> used;
  for (std::size_t e : edge_ids) {
    used.insert(g.source(e));
    used.insert(g.target(e));
  }
  std::vector<VertexId> vertices;
  for (std::size_t v : used) vertices.push_back(g.vertices()[v]);
  std::vector<Edge> edges;
  for (std::size_t e : edge_ids) edges.push_back(g.edges()[e]);
  return LinkageGraph(std::move(vertices), std::move(edges));
}

/// Oriented simple cycle of the graph. edges[i] joins vertices[i] and vertices[i+1 mod n].
struct DistinguishedCycle {
  std::vector<VertexId> vertices;
  std::vector<std::size_t> edges;

  std::size_t size() const noexcept { return vertices.size(); }
  const VertexId& at(std::size_t i) const { return vertices[i % vertices.size()]; }
};

inline DistinguishedCycle make_cycle(const LinkageGraph& g, std::vector<VertexId> vertices) {
  if (vertices.size() < 3) detail::fail(ErrorKind::InvalidInput, "distinguished cycle needs at least 3 vertices");
  std::set<VertexId> distinct(vertices.begin(), vertices.end());
  if (distinct.size() != vertices.size())
    detail::fail(ErrorKind::InvalidInput, "distinguished cycle repeats a vertex");
  DistinguishedCycle cycle;
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const VertexId& a = vertices[i];
    const VertexId& b = vertices[(i + 1) % vertices.size()];
    auto e = g.find_edge(a, b, used);
    if (!e) detail::fail(ErrorKind::InvalidInput, "cycle step " + a + " -> " + b + " is not an edge");
    used.insert(*e);
    cycle.edges.push_back(*e);
  }
  cycle.vertices = std::move(vertices);
  return cycle;
}

// ---------------------------------------------------------------------------
// Series-parallel trees

enum class SPKind { Edge, Series, Parallel };

struct SPNode {
  SPKind kind = SPKind::Edge;
  VertexId from;
  VertexId to;
  std::size_t edge = 0;  // graph edge index, Edge nodes only
  std::vector<SPNode> children;
};

struct SPTree {
  SPNode root;

  const VertexId& source() const { return root.from; }
  const VertexId& sink() const { return root.to; }
};

/// Raised when a two-terminal graph does not reduce to a single edge.
class NotSeriesParallel : public Error {
 public:
  NotSeriesParallel(const std::string& what, std::vector<std::pair<VertexId, VertexId>> kernel)
      : Error(ErrorKind::NotSP, what), kernel_(std::move(kernel)) {}

  /// Edges of the irreducible multigraph left after all reductions.
  const std::vector<std::pair<VertexId, VertexId>>& kernel() const noexcept { return kernel_; }

 private:
  std::vector<std::pair<VertexId, VertexId>> kernel_;
};

namespace detail {

inline SPNode reversed(SPNode node) {
  std::swap(node.from, node.to);
  if (node.kind == SPKind::Series) std::reverse(node.children.begin(), node.children.end());
  for (SPNode& child : node.children) child = reversed(std::move(child));
  return node;
}

inline SPNode oriented_from(SPNode node, const VertexId& from) {
  return node.from == from ? node : reversed(std::move(node));
}

inline void append_flat(std::vector<SPNode>& out, SPNode node, SPKind kind) {
  if (node.kind == kind) {
    for (SPNode& child : node.children) out.push_back(std::move(child));
  } else {
    out.push_back(std::move(node));
  }
}

inline SPNode make_series(SPNode first, SPNode second) {
  SPNode node;
  node.kind = SPKind::Series;
  node.from = first.from;
  node.to = second.to;
  append_flat(node.children, std::move(first), SPKind::Series);
  append_flat(node.children, std::move(second), SPKind::Series);
  return node;
}

inline SPNode make_parallel(SPNode first, SPNode second) {
  SPNode node;
  node.kind = SPKind::Parallel;
  node.from = first.from;
  node.to = first.to;
  append_flat(node.children, std::move(first), SPKind::Parallel);
  append_flat(node.children, oriented_from(std::move(second), node.from), SPKind::Parallel);
  return node;
}

inline void collect_vertices(const SPNode& node, std::set<VertexId>& out) {
  out.insert(node.from);
  out.insert(node.to);
  for (const SPNode& child : node.children) collect_vertices(child, out);
}

inline bool validate_node(const SPNode& node, const LinkageGraph& g, std::vector<int>& edge_uses) {
  if (node.from == node.to) return false;
  switch (node.kind) {
    case SPKind::Edge: {
      if (!node.children.empty() || node.edge >= g.edge_count()) return false;
      const Edge& e = g.edges()[node.edge];
      const bool match = (e.u == node.from && e.v == node.to) || (e.u == node.to && e.v == node.from);
      ++edge_uses[node.edge];
      return match;
    }
    case SPKind::Series: {
      if (node.children.size() < 2) return false;
      if (node.children.front().from != node.from || node.children.back().to != node.to) return false;
      std::vector<std::set<VertexId>> sets;
      for (std::size_t k = 0; k < node.children.size(); ++k) {
        const SPNode& child = node.children[k];
        if (k > 0 && node.children[k - 1].to != child.from) return false;
        if (!validate_node(child, g, edge_uses)) return false;
        sets.emplace_back();
        collect_vertices(child, sets.back());
      }
      // consecutive children meet exactly at their shared terminal, others are disjoint
      for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
          std::vector<VertexId> common;
          std::set_intersection(sets[a].begin(), sets[a].end(), sets[b].begin(), sets[b].end(),
                                std::back_inserter(common));
          if (b == a + 1) {
            if (common.size() != 1 || common.front() != node.children[a].to) return false;
          } else if (!common.empty()) {
            return false;
          }
        }
      }
      return true;
    }
    case SPKind::Parallel: {
      if (node.children.size() < 2) return false;
      std::vector<std::set<VertexId>> sets;
      for (const SPNode& child : node.children) {
        if (child.from != node.from || child.to != node.to) return false;
        if (!validate_node(child, g, edge_uses)) return false;
        sets.emplace_back();
        collect_vertices(child, sets.back());
      }
      for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
          std::vector<VertexId> common;
          std::set_intersection(sets[a].begin(), sets[a].end(), sets[b].begin(), sets[b].end(),
                                std::back_inserter(common));
          if (common.size() != 2) return false;
        }
      }
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// True iff evaluating the tree by series/parallel composition reproduces `g`
/// exactly, with the tree's terminals as I and T.
inline bool validate_sp_tree(const SPTree& tree, const LinkageGraph& g) {
  std::vector<int> uses(g.edge_count(), 0);
  if (!detail::validate_node(tree.root, g, uses)) return false;
  if (!std::all_of(uses.begin(), uses.end(), [](int u) { return u == 1; })) return false;
  std::set<VertexId> seen;
  detail::collect_vertices(tree.root, seen);
  return seen.size() == g.vertex_count();
}

/// Two-terminal series-parallel decomposition by repeated series contraction of
/// non-terminal degree-2 vertices and merging of parallel edges.
inline SPTree sp_decompose(const LinkageGraph& g, const VertexId& i, const VertexId& t) {
  const std::size_t si = g.index_of(i);
  const std::size_t ti = g.index_of(t);
  if (si == ti) detail::fail(ErrorKind::InvalidInput, "terminals must differ");

  struct Item {
    std::size_t a;
    std::size_t b;
    SPNode node;
    bool alive;
  };
  std::vector<Item> items;
  items.reserve(2 * g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    SPNode leaf;
    leaf.kind = SPKind::Edge;
    leaf.from = g.edges()[e].u;
    leaf.to = g.edges()[e].v;
    leaf.edge = e;
    items.push_back({g.source(e), g.target(e), std::move(leaf), true});
  }
  const std::size_t n = g.vertex_count();
  auto incident_items = [&](std::size_t x) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (items[k].alive && (items[k].a == x || items[k].b == x)) out.push_back(k);
    }
    return out;
  };
  auto other = [&](std::size_t k, std::size_t x) { return items[k].a == x ? items[k].b : items[k].a; };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      std::map<std::size_t, std::vector<std::size_t>> by_neighbor;
      for (std::size_t k : incident_items(x)) by_neighbor[other(k, x)].push_back(k);
      for (auto& [y, group] : by_neighbor) {
        if (y < x || group.size() < 2) continue;
        const VertexId& from = g.vertices()[x];
        SPNode merged = detail::oriented_from(items[group[0]].node, from);
        for (std::size_t m = 1; m < group.size(); ++m) {
          merged = detail::make_parallel(std::move(merged), items[group[m]].node);
          items[group[m]].alive = false;
        }
        items[group[0]].node = std::move(merged);
        items[group[0]].a = x;
        items[group[0]].b = y;
        changed = true;
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (x == si || x == ti) continue;
      const auto inc = incident_items(x);
      if (inc.size() != 2) continue;
      const std::size_t y = other(inc[0], x);
      const std::size_t z = other(inc[1], x);
      if (y == z) continue;  // parallel pair, merged on the next sweep
      SPNode first = detail::oriented_from(items[inc[0]].node, g.vertices()[y]);
      SPNode second = detail::oriented_from(items[inc[1]].node, g.vertices()[x]);
      items[inc[0]].node = detail::make_series(std::move(first), std::move(second));
      items[inc[0]].a = y;
      items[inc[0]].b = z;
      items[inc[1]].alive = false;
      changed = true;
    }
  }

  std::vector<std::size_t> alive;
  for (std::size_t k = 0; k < items.size(); ++k)
    if (items[k].alive) alive.push_back(k);
  if (alive.size() == 1) {
    const Item& last = items[alive[0]];
    if ((last.a == si && last.b == ti) || (last.a == ti && last.b == si)) {
      return SPTree{detail::oriented_from(last.node, i)};
    }
  }
  std::vector<std::pair<VertexId, VertexId>> kernel;
  for (std::size_t k : alive) kernel.emplace_back(g.vertices()[items[k].a], g.vertices()[items[k].b]);
  throw NotSeriesParallel("graph is not two-terminal series-parallel for terminals (" + i + ", " + t + ")",
                          std::move(kernel));
}

/// Edge sets of the biconnected components (Tarjan, multigraph aware).
inline std::vector<std::vector<std::size_t>> biconnected_blocks(const LinkageGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::size_t> edge_stack;
  std::vector<std::vector<std::size_t>> blocks;
  int timer = 0;

  struct Frame {
    std::size_t vertex;
    std::size_t parent_edge;
    std::size_t next;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> stack{{root, kNone, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& inc = g.incident(f.vertex);
      if (f.next < inc.size()) {
        const std::size_t e = inc[f.next++];
        if (e == f.parent_edge) continue;
        const std::size_t y = g.other_end(e, f.vertex);
        if (disc[y] == -1) {
          edge_stack.push_back(e);
          disc[y] = low[y] = timer++;
          stack.push_back({y, e, 0});
        } else if (disc[y] < disc[f.vertex]) {
          edge_stack.push_back(e);
          low[f.vertex] = std::min(low[f.vertex], disc[y]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      Frame& parent = stack.back();
      low[parent.vertex] = std::min(low[parent.vertex], low[done.vertex]);
      if (low[done.vertex] >= disc[parent.vertex]) {
        std::vector<std::size_t> block;
        while (!edge_stack.empty()) {
          const std::size_t e = edge_stack.back();
          edge_stack.pop_back();
          block.push_back(e);
          if (e == done.parent_edge) break;
        }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
      }
    }
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

/// Terminal pair of a block that admits an SP decomposition, tried in sorted
/// order over adjacent pairs; nullopt if none does.
inline std::optional<SPTree> decompose_with_adjacent_terminals(const LinkageGraph& g) {
  std::set<std::pair<VertexId, VertexId>> pairs;
  for (const Edge& e : g.edges()) pairs.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
  for (const auto& [a, b] : pairs) {
    try {
      return sp_decompose(g, a, b);
    } catch (const NotSeriesParallel&) {
    }
  }
  return std::nullopt;
}

/// No K4 minor. Checked block by block: every biconnected block must be
/// two-terminal series-parallel for some pair of adjacent terminals.
inline bool is_partial_two_tree(const LinkageGraph& g) {
  for (const auto& block : biconnected_blocks(g)) {
    if (block.size() < 2) continue;
    if (!decompose_with_adjacent_terminals(edge_subgraph(g, block))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Decomposition relative to a distinguished cycle

struct AttachedComponent {
  LinkageGraph graph;
  std::vector<std::size_t> edges;      // indices into the parent graph
  std::vector<VertexId> attachments;   // one or two vertices, in cycle order
  std::optional<SPTree> sp_tree;       // with attachments as terminals, when they are valid
};

struct RelativeDecomposition {
  DistinguishedCycle cycle;
  std::vector<AttachedComponent> components;
};

inline RelativeDecomposition relative_decomposition(const LinkageGraph& g, const DistinguishedCycle& gamma) {
  std::map<std::size_t, std::size_t> cycle_pos;
  for (std::size_t k = 0; k < gamma.size(); ++k) cycle_pos[g.index_of(gamma.vertices[k])] = k;
  const std::set<std::size_t> cycle_edges(gamma.edges.begin(), gamma.edges.end());

  std::vector<std::size_t> parent(g.edge_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (cycle_pos.count(v)) continue;
    const auto& inc = g.incident(v);
    for (std::size_t k = 1; k < inc.size(); ++k) parent[find(inc[k])] = find(inc[0]);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (!cycle_edges.count(e)) groups[find(e)].push_back(e);

  RelativeDecomposition out;
  out.cycle = gamma;
  for (auto& [root, edge_ids] : groups) {
    std::set<std::size_t> attach;
    for (std::size_t e : edge_ids) {
      if (cycle_pos.count(g.source(e))) attach.insert(cycle_pos[g.source(e)]);
      if (cycle_pos.count(g.target(e))) attach.insert(cycle_pos[g.target(e)]);
    }
    if (attach.size() >= 3)
      detail::fail(ErrorKind::NotPTT, "a component attaches to the cycle at " + std::to_string(attach.size()) +
                                          " vertices");
    if (attach.empty()) detail::fail(ErrorKind::InvalidInput, "component detached from the cycle");
    AttachedComponent comp{edge_subgraph(g, edge_ids), edge_ids, {}, std::nullopt};
    for (std::size_t pos : attach) comp.attachments.push_back(gamma.vertices[pos]);
    if (comp.attachments.size() == 2) {
      try {
        comp.sp_tree = sp_decompose(comp.graph, comp.attachments[0], comp.attachments[1]);
      } catch (const NotSeriesParallel&) {
      }
    }
    out.components.push_back(std::move(comp));
  }
  std::sort(out.components.begin(), out.components.end(), [&](const auto& x, const auto& y) {
    auto key = [&](const AttachedComponent& c) {
      std::vector<std::size_t> k;
      for (const auto& v : c.attachments) k.push_back(cycle_pos[g.index_of(v)]);
      k.push_back(c.edges.front());
      return k;
    };
    return key(x) < key(y);
  });
  return out;
}

/// A component that is a path joining its two attachment vertices.
struct AttachedPath {
  std::vector<VertexId> vertices;  // from first attachment to second
  std::vector<std::size_t> edges;  // parent-graph indices, edges[k] joins vertices[k], vertices[k+1]
};

inline std::optional<AttachedPath> as_attached_path(const AttachedComponent& comp) {
  if (comp.attachments.size() != 2) return std::nullopt;
  const LinkageGraph& h = comp.graph;
  if (h.edge_count() + 1 != h.vertex_count()) return std::nullopt;
  const std::size_t start = h.index_of(comp.attachments[0]);
  const std::size_t end = h.index_of(comp.attachments[1]);
  if (h.degree(start) != 1 || h.degree(end) != 1) return std::nullopt;
  AttachedPath path;
  path.vertices.push_back(comp.attachments[0]);
  std::size_t prev_edge = static_cast<std::size_t>(-1);
  std::size_t x = start;
  while (x != end) {
    const auto& inc = h.incident(x);
    if (x != start && inc.size() != 2) return std::nullopt;
    const std::size_t e = inc[0] == prev_edge ? inc.at(1) : inc[0];
    path.edges.push_back(comp.edges[e]);
    x = h.other_end(e, x);
    path.vertices.push_back(h.vertices()[x]);
    prev_edge = e;
    if (path.edges.size() > h.edge_count()) return std::nullopt;
  }
  if (path.edges.size() != h.edge_count()) return std::nullopt;
  return path;
}

// ---------------------------------------------------------------------------
// Elementary cycles of a polygon cut by non-crossing diagonals

struct CellSegment {
  enum class Kind { CycleEdge, Diagonal };
  Kind kind = Kind::CycleEdge;
  std::size_t index = 0;  // cycle step i (vertices[i] -> vertices[i+1]) or diagonal index
  bool reversed = false;  // diagonal walked from its second endpoint to its first
  VertexId from;
  VertexId to;
};

struct ElementaryCycle {
  std::vector<VertexId> vertices;  // segments[k] runs vertices[k] -> vertices[k+1 mod size]
  std::vector<CellSegment> segments;
};

inline bool diagonals_cross(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

/// Cells into which the diagonals cut the cycle. Every diagonal is walked
/// forward in one cell and backward in another, so the cells sum to `gamma`.
inline std::vector<ElementaryCycle> elementary_cycles(const DistinguishedCycle& gamma,
                                                      const std::vector<std::pair<VertexId, VertexId>>& diagonals) {
  const std::size_t n = gamma.size();
  std::map<VertexId, std::size_t> pos;
  for (std::size_t k = 0; k < n; ++k) pos[gamma.vertices[k]] = k;

  struct Node {
    std::size_t lo, hi;
    std::size_t diagonal;  // index into `diagonals`, or npos for the root
    std::vector<std::size_t> children;
  };
  constexpr std::size_t kRoot = static_cast<std::size_t>(-1);
  std::vector<Node> nodes;
  nodes.push_back({0, n - 1, kRoot, {}});
  for (std::size_t d = 0; d < diagonals.size(); ++d) {
    auto a = pos.find(diagonals[d].first);
    auto b = pos.find(diagonals[d].second);
    if (a == pos.end() || b == pos.end())
      detail::fail(ErrorKind::InvalidInput, "diagonal endpoint is not on the cycle");
    if (a->second == b->second) detail::fail(ErrorKind::InvalidInput, "diagonal joins a vertex to itself");
    nodes.push_back({std::min(a->second, b->second), std::max(a->second, b->second), d, {}});
  }
  for (std::size_t x = 1; x < nodes.size(); ++x) {
    for (std::size_t y = x + 1; y < nodes.size(); ++y) {
      if (diagonals_cross(nodes[x].lo, nodes[x].hi, nodes[y].lo, nodes[y].hi))
        detail::fail(ErrorKind::CrossingDiagonals, "diagonals " + std::to_string(nodes[x].diagonal) + " and " +
                                                       std::to_string(nodes[y].diagonal) + " cross");
    }
  }

  std::vector<std::size_t> order(nodes.size() - 1);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return nodes[x].hi - nodes[x].lo > nodes[y].hi - nodes[y].lo;
  });
  std::vector<std::size_t> processed{0};
  for (std::size_t x : order) {
    // containing intervals form a chain; the last one processed is innermost
    std::size_t best = 0;
    for (std::size_t p : processed) {
      if (nodes[p].lo <= nodes[x].lo && nodes[x].hi <= nodes[p].hi) best = p;
    }
    nodes[best].children.push_back(x);
    processed.push_back(x);
  }

  auto diag_segment = [&](std::size_t node, bool forward) {
    const Node& nd = nodes[node];
    CellSegment s;
    s.kind = CellSegment::Kind::Diagonal;
    s.index = nd.diagonal;
    s.from = gamma.vertices[forward ? nd.lo : nd.hi];
    s.to = gamma.vertices[forward ? nd.hi : nd.lo];
    s.reversed = s.from != diagonals[nd.diagonal].first;
    return s;
  };

  std::vector<ElementaryCycle> cells;
  std::vector<std::size_t> emit{0};
  for (std::size_t x : order) emit.push_back(x);
  for (std::size_t id : emit) {
    const Node& nd = nodes[id];
    std::map<std::size_t, std::size_t> child_at;
    for (std::size_t c : nd.children) child_at.emplace(nodes[c].lo, c);
    ElementaryCycle cell;
    std::size_t k = nd.lo;
    while (k < nd.hi) {
      cell.vertices.push_back(gamma.vertices[k]);
      auto it = child_at.find(k);
      if (it != child_at.end()) {
        cell.segments.push_back(diag_segment(it->second, true));
        k = nodes[it->second].hi;
      } else {
        CellSegment s;
        s.kind = CellSegment::Kind::CycleEdge;
        s.index = k;
        s.from = gamma.vertices[k];
        s.to = gamma.vertices[k + 1];
        cell.segments.push_back(s);
        ++k;
      }
    }
    cell.vertices.push_back(gamma.vertices[nd.hi]);
    if (id == 0) {
      CellSegment s;
      s.kind = CellSegment::Kind::CycleEdge;
      s.index = n - 1;
      s.from = gamma.vertices[n - 1];
      s.to = gamma.vertices[0];
      cell.segments.push_back(s);
    } else {
      cell.segments.push_back(diag_segment(id, false));
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace linkarea
