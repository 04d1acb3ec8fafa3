#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "linkarea/graph.hpp"
#include "support/graph_oracles.hpp"

using namespace linkarea;

namespace {

LinkageGraph make(std::vector<VertexId> vs, std::vector<std::tuple<VertexId, VertexId, double>> es) {
  std::vector<Edge> edges;
  for (auto& [u, v, l] : es) edges.push_back({u, v, l});
  return LinkageGraph(std::move(vs), std::move(edges));
}

LinkageGraph k4() {
  return make({"a", "b", "c", "d"},
              {{"a", "b", 1}, {"a", "c", 1}, {"a", "d", 1}, {"b", "c", 1}, {"b", "d", 1}, {"c", "d", 1}});
}

// Composes the tree bottom up, checking only the composition rules, and
// returns the multiset of labelled edges it produces.
struct Evaluated {
  VertexId from, to;
  std::multiset<std::tuple<VertexId, VertexId, std::size_t>> edges;
};

Evaluated evaluate(const SPNode& n, const LinkageGraph& g) {
  Evaluated out{n.from, n.to, {}};
  if (n.kind == SPKind::Edge) {
    const Edge& e = g.edges()[n.edge];
    EXPECT_TRUE((e.u == n.from && e.v == n.to) || (e.u == n.to && e.v == n.from));
    out.edges.insert({std::min(n.from, n.to), std::max(n.from, n.to), n.edge});
    return out;
  }
  EXPECT_GE(n.children.size(), 2U);
  VertexId cursor = n.from;
  for (const SPNode& c : n.children) {
    Evaluated sub = evaluate(c, g);
    if (n.kind == SPKind::Series) {
      EXPECT_EQ(sub.from, cursor);
      cursor = sub.to;
    } else {
      EXPECT_EQ(sub.from, n.from);
      EXPECT_EQ(sub.to, n.to);
    }
    out.edges.insert(sub.edges.begin(), sub.edges.end());
  }
  if (n.kind == SPKind::Series) {
    EXPECT_EQ(cursor, n.to);
  }
  return out;
}

void expect_round_trip(const SPTree& t, const LinkageGraph& g) {
  Evaluated ev = evaluate(t.root, g);
  std::multiset<std::tuple<VertexId, VertexId, std::size_t>> want;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    want.insert({std::min(ed.u, ed.v), std::max(ed.u, ed.v), e});
  }
  EXPECT_EQ(ev.edges, want);
  EXPECT_TRUE(validate_sp_tree(t, g));
}

}  // namespace

TEST(LinkageGraph, RejectsBadInput) {
  EXPECT_THROW(make({"a", "b"}, {{"a", "a", 1}}), Error);
  EXPECT_THROW(make({"a", "b"}, {{"a", "b", 0}}), Error);
  EXPECT_THROW(make({"a", "b", "c"}, {{"a", "b", 1}}), Error);
  EXPECT_THROW(make({"a", "a"}, {{"a", "a", 1}}), Error);
  EXPECT_NO_THROW(make({"a", "b"}, {{"a", "b", 1}, {"a", "b", 2}}));
}

TEST(SPDecompose, Triangle) {
  auto g = make({"I", "T", "X"}, {{"I", "T", 1}, {"I", "X", 1}, {"X", "T", 1}});
  SPTree t = sp_decompose(g, "I", "T");
  ASSERT_EQ(t.root.kind, SPKind::Parallel);
  ASSERT_EQ(t.root.children.size(), 2U);
  EXPECT_EQ(t.root.children[0].kind, SPKind::Edge);
  EXPECT_EQ(t.root.children[1].kind, SPKind::Series);
  expect_round_trip(t, g);
}

TEST(SPDecompose, SingleEdge) {
  auto g = make({"I", "T"}, {{"I", "T", 1}});
  SPTree t = sp_decompose(g, "I", "T");
  EXPECT_EQ(t.root.kind, SPKind::Edge);
  EXPECT_EQ(t.source(), "I");
  EXPECT_EQ(t.sink(), "T");
}

TEST(SPDecompose, K4IsNotSPForAnyTerminals) {
  auto g = k4();
  for (const auto& a : g.vertices())
    for (const auto& b : g.vertices()) {
      if (a == b) continue;
      try {
        sp_decompose(g, a, b);
        FAIL() << a << b;
      } catch (const NotSeriesParallel& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSP);
        EXPECT_FALSE(e.kernel().empty());
      }
    }
}

TEST(PartialTwoTree, Examples) {
  auto chain222 = make({"I", "T", "A1", "B1", "Z1"}, {{"I", "A1", 1}, {"A1", "T", 1}, {"I", "B1", 1},
                                                       {"B1", "T", 1}, {"I", "Z1", 1}, {"Z1", "T", 1}});
  EXPECT_TRUE(is_partial_two_tree(chain222));
  EXPECT_FALSE(is_partial_two_tree(k4()));
  // two crossing chords of a hexagon: a subdivided K4
  auto nonptt = make({"v0", "v1", "v2", "v3", "v4", "v5"},
                     {{"v0", "v1", 1}, {"v1", "v2", 1}, {"v2", "v3", 1}, {"v3", "v4", 1}, {"v4", "v5", 1},
                      {"v5", "v0", 1}, {"v0", "v3", 1}, {"v1", "v4", 1}});
  EXPECT_FALSE(is_partial_two_tree(nonptt));
  // bowtie: no adjacent terminal pair works for the whole graph, but it is K4-minor free
  auto bowtie = make({"a", "b", "c", "d", "e"},
                     {{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}, {"c", "d", 1}, {"d", "e", 1}, {"e", "c", 1}});
  EXPECT_TRUE(is_partial_two_tree(bowtie));
  EXPECT_TRUE(oracles::k4_minor_free(bowtie));
}

TEST(PartialTwoTree, RandomSPGraphsAreAccepted) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto raw = oracles::random_sp(rng, 3 + trial % 25);
    auto g = oracles::to_linkage(raw, rng);
    ASSERT_TRUE(oracles::k4_minor_free(g));
    EXPECT_TRUE(is_partial_two_tree(g));
    expect_round_trip(sp_decompose(g, "v0", "v1"), g);
  }
}

TEST(PartialTwoTree, SubdividedK4IsRejected) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = oracles::to_linkage(oracles::random_subdivided_k4(rng, trial % 12), rng);
    ASSERT_FALSE(oracles::k4_minor_free(g));
    EXPECT_FALSE(is_partial_two_tree(g));
  }
}

TEST(RelativeDecomposition, ThreeChain) {
  auto g = make({"I", "T", "A1", "B1", "Z1"}, {{"I", "A1", 1}, {"A1", "T", 1}, {"I", "B1", 1},
                                               {"B1", "T", 1}, {"I", "Z1", 1}, {"Z1", "T", 1}});
  auto gamma = make_cycle(g, {"I", "A1", "T", "B1"});
  auto rd = relative_decomposition(g, gamma);
  ASSERT_EQ(rd.components.size(), 1U);
  EXPECT_EQ(rd.components[0].attachments, (std::vector<VertexId>{"I", "T"}));
  ASSERT_TRUE(rd.components[0].sp_tree.has_value());
  auto path = as_attached_path(rd.components[0]);
  ASSERT_TRUE(path);
  EXPECT_EQ(path->vertices, (std::vector<VertexId>{"I", "Z1", "T"}));
}

TEST(RelativeDecomposition, TwoDiagonalChainsAndBareCycle) {
  auto g = make({"v0", "v1", "v2", "v3", "v4", "v5", "x", "y"},
                {{"v0", "v1", 1}, {"v1", "v2", 1}, {"v2", "v3", 1}, {"v3", "v4", 1}, {"v4", "v5", 1},
                 {"v5", "v0", 1}, {"v0", "x", 1}, {"x", "v2", 1}, {"v3", "y", 1}, {"y", "v5", 1}});
  auto gamma = make_cycle(g, {"v0", "v1", "v2", "v3", "v4", "v5"});
  auto rd = relative_decomposition(g, gamma);
  ASSERT_EQ(rd.components.size(), 2U);
  std::set<std::size_t> covered;
  for (const auto& c : rd.components) {
    EXPECT_TRUE(as_attached_path(c));
    for (auto e : c.edges) EXPECT_TRUE(covered.insert(e).second);
  }
  for (auto e : gamma.edges) EXPECT_TRUE(covered.insert(e).second);
  EXPECT_EQ(covered.size(), g.edge_count());

  auto square = make({"a", "b", "c", "d"}, {{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}, {"d", "a", 1}});
  EXPECT_TRUE(relative_decomposition(square, make_cycle(square, {"a", "b", "c", "d"})).components.empty());
}

TEST(RelativeDecomposition, ThreeAttachmentsIsNotPTT) {
  auto g = make({"v0", "v1", "v2", "v3", "h"}, {{"v0", "v1", 1}, {"v1", "v2", 1}, {"v2", "v3", 1}, {"v3", "v0", 1},
                                                {"h", "v0", 1}, {"h", "v1", 1}, {"h", "v2", 1}});
  try {
    relative_decomposition(g, make_cycle(g, {"v0", "v1", "v2", "v3"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPTT);
  }
}

namespace {

DistinguishedCycle ring(std::size_t n) {
  std::vector<VertexId> vs;
  std::vector<Edge> es;
  for (std::size_t k = 0; k < n; ++k) vs.push_back("v" + std::to_string(k + 1));
  for (std::size_t k = 0; k < n; ++k) es.push_back({vs[k], vs[(k + 1) % n], 1.0});
  LinkageGraph g(vs, es);
  return make_cycle(g, vs);
}

// Edge multiset check: each cycle edge once, each diagonal once in each direction.
void expect_homological_sum(const DistinguishedCycle& gamma, const std::vector<ElementaryCycle>& cells,
                            std::size_t n_diag) {
  std::multiset<std::size_t> cycle_edges;
  std::vector<int> forward(n_diag, 0), backward(n_diag, 0);
  for (const auto& c : cells) {
    ASSERT_EQ(c.vertices.size(), c.segments.size());
    for (std::size_t k = 0; k < c.segments.size(); ++k) {
      const auto& s = c.segments[k];
      EXPECT_EQ(s.from, c.vertices[k]);
      EXPECT_EQ(s.to, c.vertices[(k + 1) % c.vertices.size()]);
      if (s.kind == CellSegment::Kind::CycleEdge) {
        cycle_edges.insert(s.index);
        EXPECT_EQ(s.from, gamma.at(s.index));
        EXPECT_EQ(s.to, gamma.at(s.index + 1));
      } else {
        (s.reversed ? backward : forward)[s.index]++;
      }
    }
  }
  EXPECT_EQ(cycle_edges.size(), gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) EXPECT_EQ(cycle_edges.count(i), 1U);
  for (std::size_t d = 0; d < n_diag; ++d) {
    EXPECT_EQ(forward[d], 1);
    EXPECT_EQ(backward[d], 1);
  }
}

}  // namespace

TEST(ElementaryCycles, Examples) {
  auto hex = ring(6);
  auto cells = elementary_cycles(hex, {{"v1", "v4"}});
  ASSERT_EQ(cells.size(), 2U);
  for (const auto& c : cells) EXPECT_EQ(c.vertices.size(), 4U);
  expect_homological_sum(hex, cells, 1);

  auto bare = elementary_cycles(hex, {});
  ASSERT_EQ(bare.size(), 1U);
  EXPECT_EQ(bare[0].vertices, hex.vertices);

  auto hept = ring(7);
  auto three = elementary_cycles(hept, {{"v1", "v4"}, {"v4", "v7"}});
  ASSERT_EQ(three.size(), 3U);
  std::multiset<std::size_t> sizes;
  for (const auto& c : three) sizes.insert(c.vertices.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{3, 4, 4}));
  expect_homological_sum(hept, three, 2);

  EXPECT_THROW(elementary_cycles(hex, {{"v1", "v4"}, {"v2", "v5"}}), Error);
}

TEST(ElementaryCycles, RandomNestedDiagonals) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    auto gamma = ring(n);
    std::vector<std::pair<VertexId, VertexId>> diags;
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::size_t a = rng() % n, b = rng() % n;
      if (a > b) std::swap(a, b);
      if (b - a < 2 || (a == 0 && b == n - 1)) continue;
      bool ok = true;
      for (auto [c, d] : idx) ok = ok && !diagonals_cross(a, b, c, d) && !(a == c && b == d);
      if (!ok) continue;
      idx.emplace_back(a, b);
      diags.emplace_back(gamma.vertices[a], gamma.vertices[b]);
    }
    auto cells = elementary_cycles(gamma, diags);
    EXPECT_EQ(cells.size(), diags.size() + 1);
    expect_homological_sum(gamma, cells, diags.size());
  }
}
