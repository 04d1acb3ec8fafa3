// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "linkarea/linkarea.hpp"
#include "support/graph_oracles.hpp"
#include "support/linkages.hpp"
#include "support/worked_example.hpp"

using namespace linkarea;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "first failure: " << what << "; ";
    pass = false;
  }
};

ThreeChain random_three_chain(std::mt19937_64& rng, std::size_t p, std::size_t q, std::size_t r) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  while (true) {
    ThreeChain tc;
    for (std::size_t i = 0; i < p; ++i) tc.a.push_back(u(rng));
    for (std::size_t i = 0; i < q; ++i) tc.b.push_back(u(rng));
    for (std::size_t i = 0; i < r; ++i) tc.z.push_back(u(rng));
    const LinkageGraph g = tc.linkage();
    if (wall_check(g, 0.02 * g.total_length()).clean()) return tc;
  }
}

Configuration polygon_configuration(const CyclicPolygon& p) {
  Configuration c;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) c["p" + std::to_string(i)] = p.vertices[i];
  return c;
}

// ---------------------------------------------------------------------------

void polygon_indices(Outcome& o) {
  std::mt19937_64 rng(101);
  std::size_t configs = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + t % 3;
    const auto l = fixtures::generic_lengths(rng, n);
    const auto poly = fixtures::polygon(l);
    const AngleChart chart(poly.graph);
    const TrigObjective area = area_objective(chart, poly.cycle);
    const auto all = enumerate_cyclic(l);
    o.require(!all.empty(), "polygon with no cyclic configuration");
    for (const auto& p : all) {
      const InertiaTriple in = constrained_inertia(chart, area, polygon_configuration(p));
      o.require(in.zero == 0 && in.negative == cyclic_index(p), "cyclic_index differs from oracle inertia " + describe(in));
      ++configs;
    }
  }
  o.detail << "50 polygons, " << configs << " cyclic configurations";
}

void three_chain_completeness(Outcome& o) {
  std::mt19937_64 rng(202);
  std::size_t records = 0, clusters = 0;
  for (int t = 0; t < 25; ++t) {
    const ThreeChain tc = random_three_chain(rng, 2, 2, 2);
    const auto e = enumerate_critical_three_chain(tc);
    VerifyOptions vo;
    vo.oracle.n_seeds = 1000;
    const VerifyReport rep = verify_records(tc.linkage(), tc.gamma_vertices(), e.records, vo);
    for (const auto& p : rep.problems) o.require(false, p);
    records += e.records.size();
    clusters += rep.clusters;
  }
  o.detail << "25 instances, " << records << " records, " << clusters << " oracle clusters";
}

void sixteen_points(Outcome& o) {
  std::mt19937_64 rng(303);
  for (int t = 1; t <= 5000; ++t) {
    const ThreeChain tc = random_three_chain(rng, 2, 2, 2);
    const auto e = enumerate_critical_three_chain(tc);
    if (e.records.size() != 16) continue;
    const VerifyReport rep = verify_records(tc.linkage(), tc.gamma_vertices(), e.records);
    if (!rep.ok() || rep.clusters != 16) continue;
    o.detail.precision(17);
    o.detail << "draw " << t << ": a=(" << tc.a[0] << ", " << tc.a[1] << ") b=(" << tc.b[0] << ", " << tc.b[1]
             << ") z=(" << tc.z[0] << ", " << tc.z[1] << "), 16 records, 16 oracle clusters";
    return;
  }
  o.require(false, "no 16-point instance in 5000 draws");
}

void bott_morse(Outcome& o) {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 200; ++t) {
    const ThreeChain tc = random_three_chain(rng, 2, 2, 3);
    const auto e = enumerate_critical_three_chain(tc);
    int circular = 0, aligned = 0;
    for (const auto& r : e.records) (r.chains[0].aligned ? aligned : circular)++;
    if (circular == 0 || aligned == 0) continue;
    const LinkageGraph g = tc.linkage();
    const AngleChart chart(g);
    const TrigObjective area = area_objective(chart, tc.gamma_vertices());
    for (const auto& r : e.records) {
      const InertiaTriple in = constrained_inertia(chart, area, r.representative);
      const int want = r.chains[0].aligned ? 0 : 1;
      o.require(in.zero == want, r.kind_key + ": zero count " + std::to_string(in.zero));
      o.require(in.negative == r.index.index, r.kind_key + ": index " + std::to_string(r.index.index) + " vs " + describe(in));
    }
    o.detail << "draw " << t << ": " << circular << " circular records (zero 1), " << aligned << " aligned (zero 0)";
    return;
  }
  o.require(false, "no [2,2;3] draw with both record types");
}

void pitchfork(Outcome& o) {
  const ThreeChain tc{{1.0, 1.3}, {1.1, 0.9}, {0.7, 0.8}};
  const LinkageGraph g = tc.linkage();
  std::size_t edge = g.edge_count();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    if ((ed.u == "I" && ed.v == "Z1") || (ed.u == "Z1" && ed.v == "I")) edge = e;
  }
  const double critical = concyclic_diagonal_222(1.0, 1.3, 1.1, 0.9) - 0.8;
  const BranchDiagram d = continue_family(g, tc.gamma_vertices(), edge, critical - 0.031, critical + 0.043, 8);
  auto point = [](const DiagramColumn& c, std::size_t b) -> const BranchPoint* {
    for (const auto& p : c.points)
      if (p.branch == b) return &p;
    return nullptr;
  };
  int max_to_min = 0, min_to_max = 0;
  double worst = 0;
  for (const auto& e : d.events) {
    if (e.type == EventType::HessianZero) worst = std::max(worst, std::abs(e.parameter - critical));
    if (e.type != EventType::PitchforkSplit) continue;
    if (e.negative_before == 1 && e.negative_after == 0) {
      ++max_to_min;
      const BranchPoint* parent = point(d.columns.front(), e.branch);
      o.require(parent && parent->kind == "aligned", "split parent is not aligned");
      o.require(e.children.size() == 2, "split without two children");
      for (std::size_t c : e.children) {
        const BranchPoint* p = point(d.columns.back(), c);
        o.require(p && p->kind == "circular" && p->inertia.negative == 1, "child is not a circular maximum");
      }
    } else if (e.negative_before == 0 && e.negative_after == 1) {
      ++min_to_max;
    }
  }
  o.require(max_to_min == 1, "maximum-to-minimum splits: " + std::to_string(max_to_min));
  o.require(d.count(EventType::HessianZero) > 0, "no HessianZero event");
  o.require(worst <= 1e-6, "HessianZero off the concyclic length");
  o.detail.precision(3);
  o.detail << "1 max->min split (mirror min->max splits: " << min_to_max << "), " << d.count(EventType::HessianZero)
           << " HessianZero within " << worst << " of the concyclic length";
}

void worked_example(Outcome& o) {
  const auto ex = fixtures::worked_example();
  const auto pnd = recognize_pnd(ex.graph, make_cycle(ex.graph, ex.gamma));
  o.require(pnd.chains.size() == 2, "expected two diagonal chains");
  const auto cls = classify_configuration(pnd, ex.configuration);
  o.require(cls.critical && cls.record.has_value(), "configuration not recognized as critical");
  if (!cls.record) return;
  std::vector<int> mus;
  for (const auto& cell : cls.record->cells) mus.push_back(cyclic_index(cell));
  std::sort(mus.begin(), mus.end());
  o.require(mus == std::vector<int>{0, 1, 5}, "cell indices");
  for (const auto& st : cls.record->chains) o.require(st.nu == 1, "chain contribution");
  o.require(cls.record->index.index == 8, "index " + std::to_string(cls.record->index.index));
  const AngleChart chart(ex.graph);
  const InertiaTriple in = constrained_inertia(chart, area_objective(chart, ex.gamma), ex.configuration);
  o.require(in.negative == 8 && in.zero == 0, "oracle inertia " + describe(in));
  o.detail << "index 8 = 1+0+5+1+1, oracle " << describe(in);
}

int oracle_euler(const LinkageGraph& g, const std::vector<VertexId>& gamma, std::size_t& clusters) {
  const AngleChart chart(g);
  const auto found = find_critical_numeric(chart, area_objective(chart, gamma), OracleOptions{});
  clusters = found.size();
  int chi = 0;
  for (const auto& c : found) chi += c.inertia.negative % 2 ? -1 : 1;
  return chi;
}

void euler(Outcome& o) {
  std::mt19937_64 rng(707);
  int spaces = 0;
  for (int t = 0; t < 10; ++t) {
    LinkageGraph g;
    std::vector<VertexId> gamma;
    std::vector<CriticalRecord> records;
    if (t < 5) {
      const auto poly = fixtures::polygon(fixtures::generic_lengths(rng, 4));
      g = poly.graph;
      gamma = poly.cycle;
      records = enumerate_critical_pnd(recognize_pnd(g, make_cycle(g, gamma))).records;
    } else {
      const ThreeChain tc = random_three_chain(rng, 2, 2, 2);
      g = tc.linkage();
      gamma = tc.gamma_vertices();
      records = enumerate_critical_three_chain(tc).records;
    }
    const EulerSum s = euler_sum(records);
    o.require(s.value && *s.value == 0, "symbolic sum nonzero");
    std::size_t clusters = 0;
    const int chi = oracle_euler(g, gamma, clusters);
    o.require(chi == 0, "oracle sum " + std::to_string(chi));
    o.require(clusters == records.size(), "oracle finds " + std::to_string(clusters) + " points, symbolic " +
                                              std::to_string(records.size()));
    ++spaces;
  }
  o.detail << spaces << " spaces (5 quadrilaterals, 5 [2,2;2]), symbolic and oracle sums 0";
}

void determinant(Outcome& o) {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<long double> len(0.1L, 3.0L), ang(0.0L, 3.14159265358979323846L);
  long double worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const long double a1 = len(rng), a2 = len(rng), b1 = len(rng), b2 = len(rng), c1 = len(rng), c2 = len(rng);
    const long double al = ang(rng), be = ang(rng), ga = ang(rng);
    const long double closed = lagrange_det_222(a1, a2, b1, b2, c1, c2, al, be, ga);
    const long double numeric = det3(lagrange_matrix_222(a1, a2, b1, b2, c1, c2, al, be, ga));
    // relative to the determinant, floored by the size of its entries' product
    const long double scale = std::max(std::abs(closed), 1e-6L * 4 * a1 * a2 * b1 * b2 * c1 * c2);
    worst = std::max(worst, std::abs(closed - numeric) / scale);
  }
  o.require(worst <= 1e-12L, "relative error above 1e-12");
  o.detail.precision(3);
  o.detail << "10^4 samples, worst relative error " << static_cast<double>(worst);
}

void numerical_hygiene(Outcome& o) {
  std::mt19937_64 rng(909);
  struct Case {
    std::string name;
    LinkageGraph g;
    std::vector<VertexId> gamma;
  };
  std::vector<Case> cases;
  for (std::size_t n : {4, 5, 6}) {
    const auto p = fixtures::polygon(fixtures::generic_lengths(rng, n));
    cases.push_back({"polygon" + std::to_string(n), p.graph, p.cycle});
  }
  for (auto [p, q, r] : std::vector<std::array<std::size_t, 3>>{{2, 2, 2}, {2, 2, 3}, {2, 3, 2}, {3, 2, 4}}) {
    const ThreeChain tc = random_three_chain(rng, p, q, r);
    cases.push_back({"three-chain", tc.linkage(), tc.gamma_vertices()});
  }
  const auto ex = fixtures::worked_example();
  cases.push_back({"diagonal chains", ex.graph, ex.gamma});
  const auto bubble = io::read_linkage(LINKAREA_SAMPLES "/bubble_chain.json");
  cases.push_back({"general partial two-tree", bubble.graph, *bubble.gamma});

  double grad = 0, hess = 0;
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    const Case& c = cases[k % cases.size()];
    const AngleChart chart(c.g);
    const TrigObjective area = area_objective(chart, c.gamma);
    try {
      const FdReport rep = fd_check_chart(chart, area, random_feasible(chart, rng));
      grad = std::max(grad, rep.gradient_error);
      hess = std::max(hess, rep.hessian_error);
      ++checked;
    } catch (const Error& e) {
      o.require(false, c.name + ": " + e.what());
    }
  }
  o.detail.precision(3);
  o.detail << checked << " configurations over " << cases.size() << " linkages, worst gradient " << grad
           << ", worst Hessian " << hess;
}

// Composes a tree bottom up; nullopt when a composition rule is broken.
using EdgeSet = std::multiset<std::tuple<VertexId, VertexId, std::size_t>>;

std::optional<EdgeSet> compose(const SPNode& n, const LinkageGraph& g) {
  EdgeSet out;
  if (n.kind == SPKind::Edge) {
    if (n.edge >= g.edge_count()) return std::nullopt;
    const Edge& e = g.edges()[n.edge];
    if (!((e.u == n.from && e.v == n.to) || (e.u == n.to && e.v == n.from))) return std::nullopt;
    out.insert({std::min(n.from, n.to), std::max(n.from, n.to), n.edge});
    return out;
  }
  if (n.children.size() < 2) return std::nullopt;
  VertexId cursor = n.from;
  for (const SPNode& c : n.children) {
    if (n.kind == SPKind::Series) {
      if (c.from != cursor) return std::nullopt;
      cursor = c.to;
    } else if (c.from != n.from || c.to != n.to) {
      return std::nullopt;
    }
    const auto sub = compose(c, g);
    if (!sub) return std::nullopt;
    out.insert(sub->begin(), sub->end());
  }
  if (n.kind == SPKind::Series && cursor != n.to) return std::nullopt;
  return out;
}

void recognition(Outcome& o) {
  std::mt19937_64 rng(1010);
  for (int t = 0; t < 200; ++t) {
    const LinkageGraph g = oracles::to_linkage(oracles::random_sp(rng, 3 + t % 25), rng);
    o.require(oracles::k4_minor_free(g), "generator produced a K4 minor");
    o.require(is_partial_two_tree(g), "SP graph rejected");
    const SPTree tree = sp_decompose(g, "v0", "v1");
    const auto text = io::to_json(tree).dump();
    const SPTree back = io::sp_tree_from_json(io::json::parse(text));
    EdgeSet want;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      want.insert({std::min(g.edges()[e].u, g.edges()[e].v), std::max(g.edges()[e].u, g.edges()[e].v), e});
    const auto got = compose(back.root, g);
    o.require(got && *got == want, "tree does not compose to the graph");
    o.require(io::to_json(back).dump() == text && validate_sp_tree(back, g), "tree round-trip");
  }
  for (int t = 0; t < 50; ++t) {
    const LinkageGraph g = oracles::to_linkage(oracles::random_subdivided_k4(rng, t % 12), rng);
    o.require(!oracles::k4_minor_free(g), "generator lost the K4 minor");
    o.require(!is_partial_two_tree(g), "subdivided K4 accepted");
  }
  o.detail << "200 SP graphs accepted with round-tripped trees, 50 subdivided K4 rejected";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"polygon index vs oracle inertia", polygon_indices},
      {"[2,2;2] classification completeness", three_chain_completeness},
      {"sixteen critical points witness", sixteen_points},
      {"Bott-Morse structure on [2,2;3]", bott_morse},
      {"pitchfork in a [2,2;2] family", pitchfork},
      {"worked example index 8", worked_example},
      {"Euler bookkeeping", euler},
      {"determinant identity", determinant},
      {"finite-difference hygiene", numerical_hygiene},
      {"partial two-tree recognition", recognition},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
