#include <gtest/gtest.h>

#include <random>

#include "linkarea/io.hpp"
#include "support/graph_oracles.hpp"
#include "support/linkages.hpp"

using namespace linkarea;
using io::json;

namespace {

// text -> value -> text must be a fixed point
json round(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST(LinkageJson, ParsesAndRoundTrips) {
  const json j = json::parse(R"({"vertices": ["a", "b", 3], "edges": [{"u": "a", "v": "b", "len": 1.5},
      {"u": "b", "v": 3, "len": 0.25}, {"u": 3, "v": "a", "len": 1.375}], "gamma": ["a", "b", 3],
      "terminals": {"I": "a", "T": 3}})");
  const io::LinkageFile lf = io::linkage_from_json(j);
  EXPECT_EQ(lf.graph.vertex_count(), 3u);
  EXPECT_EQ(lf.graph.edges()[2].u, "3");
  EXPECT_DOUBLE_EQ(lf.graph.edges()[1].length, 0.25);
  ASSERT_TRUE(lf.gamma);
  ASSERT_TRUE(lf.terminals);
  EXPECT_EQ(lf.terminals->second, "3");
  const json back = io::to_json(lf.graph, lf.gamma, lf.terminals);
  const io::LinkageFile again = io::linkage_from_json(round(back));
  EXPECT_EQ(io::to_json(again.graph, again.gamma, again.terminals).dump(), back.dump());
}

TEST(LinkageJson, Errors) {
  EXPECT_THROW(io::parse_text("{\"vertices\": ["), Error);
  EXPECT_THROW(io::linkage_from_json(json::parse(R"({"vertices": ["a"]})")), Error);
  EXPECT_THROW(io::linkage_from_json(json::parse(R"({"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "len": "x"}]})")), Error);
  EXPECT_THROW(io::linkage_from_json(json::parse(R"({"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "len": -1}]})")), Error);
}

TEST(ConfigurationJson, LosslessDoubles) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  Configuration c;
  for (int k = 0; k < 20; ++k) c["v" + std::to_string(k)] = {u(rng), u(rng) * 1e-7};
  const Configuration back = io::configuration_from_json(round(io::to_json(c)));
  for (const auto& [v, p] : c.coords) {
    EXPECT_EQ(back.at(v).x(), p.x());
    EXPECT_EQ(back.at(v).y(), p.y());
  }
}

TEST(CyclicJson, AllFields) {
  const auto sols = enumerate_cyclic({1.0, 1.3, 0.85, 1.2, 0.7});
  ASSERT_FALSE(sols.empty());
  for (const auto& p : sols) {
    const CyclicPolygon q = io::cyclic_from_json(round(io::to_json(p)));
    EXPECT_EQ(q.lengths, p.lengths);
    EXPECT_EQ(q.center, p.center);
    EXPECT_EQ(q.radius, p.radius);
    EXPECT_EQ(q.vertices, p.vertices);
    EXPECT_EQ(q.eps, p.eps);
    EXPECT_EQ(q.alphas, p.alphas);
    EXPECT_EQ(q.winding, p.winding);
    EXPECT_EQ(q.positive, p.positive);
  }
}

TEST(SPTreeJson, RoundTripKeepsTheTree) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const LinkageGraph g = oracles::to_linkage(oracles::random_sp(rng, 4 + t), rng);
    const SPTree tree = sp_decompose(g, "v0", "v1");
    const json j = io::to_json(tree);
    const SPTree back = io::sp_tree_from_json(round(j));
    EXPECT_EQ(io::to_json(back).dump(), j.dump());
    EXPECT_TRUE(validate_sp_tree(back, g));
  }
  EXPECT_THROW(io::sp_tree_from_json(json::parse(R"({"op": "X", "from": "a", "to": "b"})")), Error);
}

TEST(RecordJson, RoundTrip) {
  ThreeChain tc{{1.0, 1.3}, {1.1, 0.9}, {0.6, 0.5, 0.45}};
  const auto e = enumerate_critical_three_chain(tc);
  ASSERT_FALSE(e.records.empty());
  const json j = io::to_json(e.records);
  const auto back = io::records_from_json(round(j));
  ASSERT_EQ(back.size(), e.records.size());
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].index.index, e.records[k].index.index);
    EXPECT_EQ(back[k].rigid_vertices, e.records[k].rigid_vertices);
  }
}

TEST(InertiaJson, RoundTrip) {
  InertiaTriple t;
  t.negative = 2;
  t.zero = 1;
  t.positive = 3;
  t.eigenvalues = {-2, -1, 1e-12, 1, 2, 3};
  t.zero_band = 1e-7;
  t.gap = std::numeric_limits<double>::infinity();
  const InertiaTriple b = io::inertia_from_json(round(io::to_json(t)));
  EXPECT_TRUE(b == t);
  EXPECT_EQ(b.eigenvalues, t.eigenvalues);
  EXPECT_TRUE(std::isinf(b.gap));
}

TEST(DiagramCsv, SeventeenDigits) {
  BranchDiagram d;
  DiagramColumn c{0.1, {}};
  BranchPoint p;
  p.branch = 3;
  p.area = 1.0 / 3.0;
  p.inertia.negative = 1;
  c.points.push_back(p);
  d.columns.push_back(c);
  EXPECT_EQ(io::to_csv(d), "parameter,branch,S,neg,zero,pos\n0.10000000000000001,3,0.33333333333333331,1,0,0\n");
  const json j = io::to_json(d);
  EXPECT_EQ(j["columns"][0]["points"][0]["area"].get<double>(), 1.0 / 3.0);
}
