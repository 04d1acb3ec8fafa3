// linkarea: recognize | critical | verify | continue
//
// exit codes: 0 ok, 2 parse error or bad arguments, 3 not a partial two-tree,
// 4 wall hit under --strict, 5 verification mismatch.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>

#include "linkarea/linkarea.hpp"

using namespace linkarea;
using io::json;

namespace {

constexpr int kOk = 0, kParse = 2, kNotPtt = 3, kWall = 4, kMismatch = 5;

// degenerate inputs repeat the same warning thousands of times
std::vector<std::string> collapse(const std::vector<std::string>& ws) {
  std::vector<std::string> order;
  std::map<std::string, std::size_t> seen;
  for (const auto& w : ws)
    if (seen[w]++ == 0) order.push_back(w);
  for (auto& w : order)
    if (const std::size_t n = seen[w]; n > 1) w += " (x" + std::to_string(n) + ")";
  return order;
}

struct RunConfig {
  Tolerances tol;
  double tol_wall = 1e-6;  // relative to the total length
  std::uint64_t seed = 42;
  std::size_t n_seeds = 1000;
  bool strict = false;
  std::string out;
  std::string format = "json";

  OracleOptions oracle() const {
    OracleOptions o;
    o.seed = seed;
    o.n_seeds = n_seeds;
    o.gradient_tol = tol.gradient;
    o.eigen_zero = tol.eigen_zero;
    return o;
  }
};

struct ExitWith {
  int code;
  std::string message;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ExitWith{kParse, "cannot write " + path};
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<VertexId> gamma_of(const io::LinkageFile& lf) {
  if (lf.gamma) return *lf.gamma;
  // a plain polygon: walk the cycle from the first vertex
  const LinkageGraph& g = lf.graph;
  if (g.edge_count() != g.vertex_count() || g.vertex_count() < 3) throw ExitWith{kParse, "\"gamma\" is required"};
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != 2) throw ExitWith{kParse, "\"gamma\" is required"};
  std::vector<VertexId> out{g.vertices()[0]};
  std::size_t x = 0, prev = static_cast<std::size_t>(-1);
  while (out.size() < g.vertex_count()) {
    const auto& inc = g.incident(x);
    const std::size_t e = inc[0] == prev ? inc[1] : inc[0];
    x = g.other_end(e, x);
    out.push_back(g.vertices()[x]);
    prev = e;
  }
  return out;
}

json chart_json(const std::vector<NumericCritical>& found, const LinkageGraph& g) {
  json out = json::array();
  for (const auto& f : found) {
    // numeric-only records use the record layout with oracle inertia as the index
    CriticalRecord r;
    r.kind_key = "numeric";
    r.index.index = f.inertia.negative;
    r.manifold_dim = f.inertia.zero;
    r.area = f.value;
    r.representative = f.configuration;
    r.rigid_vertices = g.vertices();
    json j = io::to_json(r);
    j["inertia"] = io::to_json(f.inertia);
    j["hits"] = f.hits;
    out.push_back(j);
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_recognize(const RunConfig& cfg, const std::string& file) {
  const io::LinkageFile lf = io::read_linkage(file);
  const LinkageGraph& g = lf.graph;
  json rep;
  const bool ptt = is_partial_two_tree(g);
  rep["ptt"] = ptt;
  rep["vertices"] = g.vertex_count();
  rep["edges"] = g.edge_count();
  if (ptt) {
    std::optional<SPTree> tree;
    if (lf.terminals) {
      try {
        tree = sp_decompose(g, lf.terminals->first, lf.terminals->second);
      } catch (const NotSeriesParallel& e) {
        rep["sp_tree_error"] = e.what();
      }
    } else {
      tree = decompose_with_adjacent_terminals(g);
    }
    rep["sp_tree"] = tree ? io::to_json(*tree) : json(nullptr);
    if (lf.gamma) {
      const DistinguishedCycle gamma = make_cycle(g, *lf.gamma);
      json comps = json::array();
      for (const auto& c : relative_decomposition(g, gamma).components) {
        json jc;
        jc["attachments"] = c.attachments;
        json edges = json::array();
        for (std::size_t e : c.edges) edges.push_back(g.edges()[e].u + "-" + g.edges()[e].v);
        jc["edges"] = edges;
        if (auto p = as_attached_path(c)) jc["chain"] = p->vertices;
        jc["sp_tree"] = c.sp_tree ? io::to_json(*c.sp_tree) : json(nullptr);
        comps.push_back(jc);
      }
      rep["decomposition"] = {{"gamma", gamma.vertices}, {"components", comps}};
    }
  }
  emit(dump(rep), cfg.out);
  return ptt ? kOk : kNotPtt;
}

int cmd_critical(const RunConfig& cfg, const std::string& file) {
  const io::LinkageFile lf = io::read_linkage(file);
  const LinkageGraph& g = lf.graph;
  const std::vector<VertexId> gamma = gamma_of(lf);
  const WallReport walls = wall_check(g, cfg.tol_wall * g.total_length());
  if (!walls.clean() && cfg.strict) {
    std::cerr << "wall_check: " << walls.hits.size() << " hit(s); refusing under --strict\n";
    emit(dump({{"wall_check", io::to_json(walls, g)}}), cfg.out);
    return kWall;
  }
  json out;
  out["wall_check"] = io::to_json(walls, g);
  std::vector<std::string> warnings;
  if (!walls.clean()) warnings.push_back("lengths lie within the wall tolerance; results may be degenerate");

  std::optional<Enumeration> en;
  try {
    const PolygonWithDiagonals pnd = recognize_pnd(g, make_cycle(g, gamma));
    EnumerationOptions eo;
    eo.tol = cfg.tol;
    eo.strict = cfg.strict;
    en = enumerate_critical_pnd(pnd, eo);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonGeneric && cfg.strict) throw ExitWith{kWall, e.what()};
    if (e.kind() != ErrorKind::UnsupportedClass && e.kind() != ErrorKind::NotPTT && e.kind() != ErrorKind::CrossingDiagonals)
      throw;
    warnings.push_back(std::string("no symbolic enumeration for this graph (") + e.what() + "); numeric search only");
  }
  if (en) {
    out["mode"] = "symbolic";
    warnings.insert(warnings.end(), en->warnings.begin(), en->warnings.end());
    warnings = collapse(warnings);
    out["warnings"] = warnings;
    out["records"] = io::to_json(en->records);
  } else {
    const AngleChart chart(g);
    out["mode"] = "numeric";
    out["warnings"] = warnings;
    out["records"] = chart_json(find_critical_numeric(chart, area_objective(chart, gamma), cfg.oracle()), g);
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "index,manifold_dim,area,kind\n";
    for (const auto& r : out["records"]) os << r["index"].get<int>() << "," << r["manifold_dim"].get<int>() << "," << r["area"].get<double>() << "," << r["kind"].get<std::string>() << "\n";
    emit(os.str(), cfg.out);
  } else {
    emit(dump(out), cfg.out);
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& file, const std::string& records_file, std::size_t fd_points) {
  const io::LinkageFile lf = io::read_linkage(file);
  const LinkageGraph& g = lf.graph;
  const std::vector<VertexId> gamma = gamma_of(lf);
  const json rj = io::read_file(records_file);
  const std::vector<CriticalRecord> records = io::records_from_json(rj.is_object() ? rj.at("records") : rj);

  VerifyOptions vo;
  vo.oracle = cfg.oracle();
  json rep;
  std::vector<std::string> warnings;
  const WallReport walls = wall_check(g, cfg.tol_wall * g.total_length());
  if (!walls.clean()) {
    warnings.push_back("lengths lie within the wall tolerance; completeness search skipped");
    vo.completeness = false;
  }
  const VerifyReport vr = verify_records(g, gamma, records, vo);

  json checks = json::array();
  for (const auto& rc : vr.records) {
    checks.push_back({{"record", rc.record}, {"kind", rc.kind_key}, {"index", rc.index}, {"manifold_dim", rc.manifold_dim},
                      {"oracle", rc.at_representative ? io::to_json(*rc.at_representative) : json(nullptr)},
                      {"clusters_matched", rc.clusters_matched}, {"problems", rc.problems}});
  }
  std::vector<std::string> problems = vr.problems;

  // derivative hygiene at random feasible points
  const AngleChart chart(g);
  const TrigObjective obj = area_objective(chart, gamma);
  std::mt19937_64 rng(cfg.seed);
  json fd = json::array();
  for (std::size_t k = 0; k < fd_points; ++k) {
    try {
      const VectorXd x = random_feasible(chart, rng);
      const FdReport r = fd_check_chart(chart, obj, x);
      fd.push_back({{"gradient_error", r.gradient_error}, {"hessian_error", r.hessian_error}, {"passed", r.passed}});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::CheckFailed) problems.push_back(std::string("fd_check: ") + e.what());
    }
  }

  rep["ok"] = problems.empty();
  rep["records"] = records.size();
  rep["clusters"] = vr.clusters;
  rep["completeness_checked"] = vo.completeness;
  rep["warnings"] = warnings;
  rep["problems"] = problems;
  rep["checks"] = checks;
  rep["fd_check"] = fd;
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& p : problems) std::cerr << "mismatch: " << p << "\n";
  emit(dump(rep), cfg.out);
  return problems.empty() ? kOk : kMismatch;
}

std::size_t edge_of(const LinkageGraph& g, const std::string& which) {
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edges()[e];
    if (which == ed.u + "-" + ed.v || which == ed.v + "-" + ed.u) return e;
  }
  std::size_t pos = 0;
  try {
    const unsigned long idx = std::stoul(which, &pos);
    if (pos == which.size() && idx < g.edge_count()) return idx;
  } catch (const std::exception&) {
  }
  throw ExitWith{kParse, "no edge " + which};
}

int cmd_continue(const RunConfig& cfg, const std::string& file, const std::string& edge, double from, double to, int steps) {
  const io::LinkageFile lf = io::read_linkage(file);
  const LinkageGraph& g = lf.graph;
  const std::vector<VertexId> gamma = gamma_of(lf);
  const std::size_t e = edge_of(g, edge);
  if (!(from > 0) || !(to > 0) || steps < 0 || (steps == 0 && from != to))
    throw ExitWith{kParse, "bad range: need positive end points and steps >= 1 unless from = to"};
  ContinuationOptions co;
  co.oracle = cfg.oracle();
  const BranchDiagram d = continue_family(g, gamma, e, from, to, steps, co);
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
  if (cfg.out.empty()) {
    emit(cfg.format == "csv" ? io::to_csv(d) : dump(io::to_json(d)), "");
  } else {
    std::string csv = cfg.out;
    const auto dot = csv.find_last_of('.');
    csv = (dot == std::string::npos || csv.find('/', dot) != std::string::npos ? csv : csv.substr(0, dot)) + ".csv";
    emit(dump(io::to_json(d)), cfg.out);
    emit(io::to_csv(d), csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of the oriented area on planar linkage configuration spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto positive = CLI::PositiveNumber;
  app.add_option("--tol-length", cfg.tol.length, "edge-length residual, relative")->check(positive);
  app.add_option("--tol-collinear", cfg.tol.collinear, "collinearity, per unit diameter")->check(positive);
  app.add_option("--tol-concyclic", cfg.tol.concyclic, "concyclicity, relative to the radius")->check(positive);
  app.add_option("--tol-gradient", cfg.tol.gradient, "projected gradient, relative")->check(positive);
  app.add_option("--tol-eigen", cfg.tol.eigen_zero, "Hessian zero band, relative to its norm")->check(positive);
  app.add_option("--tol-wall", cfg.tol_wall, "wall proximity, relative to the total length")->check(positive);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--n-seeds", cfg.n_seeds, "oracle starting points")->check(positive);
  app.add_flag("--strict", cfg.strict, "fail on wall hits and non-generic cases");
  app.add_option("--out", cfg.out, "output file (stdout when absent)");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.fallthrough();

  std::string file, records_file, edge;
  double from = 0, to = 0;
  int steps = 10;
  std::size_t fd_points = 5;

  auto* rec = app.add_subcommand("recognize", "partial two-tree test, SP tree, decomposition");
  rec->add_option("file", file, "linkage JSON")->required();
  auto* crit = app.add_subcommand("critical", "enumerate critical points");
  crit->add_option("file", file, "linkage JSON")->required();
  auto* ver = app.add_subcommand("verify", "check records against the numeric oracle");
  ver->add_option("file", file, "linkage JSON")->required();
  ver->add_option("records", records_file, "output of critical")->required();
  ver->add_option("--fd-points", fd_points, "random points for derivative checks");
  auto* con = app.add_subcommand("continue", "follow critical points in one edge length");
  con->add_option("file", file, "linkage JSON")->required();
  con->add_option("--edge", edge, "edge index or u-v")->required();
  con->add_option("--from", from)->required();
  con->add_option("--to", to)->required();
  con->add_option("--steps", steps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*rec) return cmd_recognize(cfg, file);
    if (*crit) return cmd_critical(cfg, file);
    if (*ver) return cmd_verify(cfg, file, records_file, fd_points);
    if (*con) return cmd_continue(cfg, file, edge, from, to, steps);
  } catch (const ExitWith& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const io::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::NotPTT: return kNotPtt;
      case ErrorKind::NonGeneric: return cfg.strict ? kWall : kParse;
      default: return kParse;
    }
  }
  return kOk;
}
