#pragma once

// JSON and CSV forms of the library types. Doubles are written by the JSON
// library's shortest round-trip formatter, CSV with 17 significant digits.

#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkarea/continuation.hpp"
#include "linkarea/critical.hpp"
#include "linkarea/cyclic.hpp"
#include "linkarea/graph.hpp"
#include "linkarea/oracle.hpp"

namespace linkarea::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// linkage files

struct LinkageFile {
  LinkageGraph graph;
  std::optional<std::vector<VertexId>> gamma;
  std::optional<std::pair<VertexId, VertexId>> terminals;
};

namespace detail {

// vertex ids may be given as strings or integers
inline VertexId id_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  linkarea::detail::fail(ErrorKind::ParseError, "vertex id must be a string or an integer: " + j.dump());
}

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) linkarea::detail::fail(ErrorKind::ParseError, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline double real(const json& j, const char* what) {
  if (!j.is_number()) linkarea::detail::fail(ErrorKind::ParseError, std::string(what) + " must be a number");
  return j.get<double>();
}

inline json vec(const Vec2& p) { return json::array({p.x(), p.y()}); }

inline Vec2 vec_of(const json& j) {
  if (!j.is_array() || j.size() != 2) linkarea::detail::fail(ErrorKind::ParseError, "a point is [x, y]");
  return {real(j[0], "coordinate"), real(j[1], "coordinate")};
}

}  // namespace detail

inline LinkageFile linkage_from_json(const json& j) {
  using detail::id_of, detail::need;
  std::vector<VertexId> vs;
  const json& jv = need(j, "vertices");
  if (!jv.is_array()) linkarea::detail::fail(ErrorKind::ParseError, "\"vertices\" must be an array");
  for (const auto& v : jv) vs.push_back(id_of(v));
  std::vector<Edge> es;
  const json& je = need(j, "edges");
  if (!je.is_array()) linkarea::detail::fail(ErrorKind::ParseError, "\"edges\" must be an array");
  for (const auto& e : je) es.push_back({id_of(need(e, "u")), id_of(need(e, "v")), detail::real(need(e, "len"), "len")});
  LinkageFile out{LinkageGraph(vs, es), std::nullopt, std::nullopt};
  if (j.contains("gamma")) {
    std::vector<VertexId> gamma;
    for (const auto& v : j.at("gamma")) gamma.push_back(id_of(v));
    out.gamma = gamma;
  }
  if (j.contains("terminals")) out.terminals = std::make_pair(id_of(need(j.at("terminals"), "I")), id_of(need(j.at("terminals"), "T")));
  return out;
}

inline json to_json(const LinkageGraph& g, const std::optional<std::vector<VertexId>>& gamma = std::nullopt,
                    const std::optional<std::pair<VertexId, VertexId>>& terminals = std::nullopt) {
  json j;
  j["vertices"] = g.vertices();
  json es = json::array();
  for (const auto& e : g.edges()) es.push_back({{"u", e.u}, {"v", e.v}, {"len", e.length}});
  j["edges"] = es;
  if (gamma) j["gamma"] = *gamma;
  if (terminals) j["terminals"] = {{"I", terminals->first}, {"T", terminals->second}};
  return j;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    linkarea::detail::fail(ErrorKind::ParseError, e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) linkarea::detail::fail(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

inline LinkageFile read_linkage(const std::string& path) { return linkage_from_json(read_file(path)); }

// ---------------------------------------------------------------------------
// configurations and cyclic polygons

inline json to_json(const Configuration& c) {
  json coords = json::object();
  for (const auto& [v, p] : c.coords) coords[v] = detail::vec(p);
  return {{"coords", coords}};
}

inline Configuration configuration_from_json(const json& j) {
  Configuration c;
  for (const auto& [v, p] : detail::need(j, "coords").items()) c[v] = detail::vec_of(p);
  return c;
}

inline json to_json(const CyclicPolygon& p) {
  json vs = json::array();
  for (const auto& v : p.vertices) vs.push_back(detail::vec(v));
  return {{"lengths", p.lengths}, {"center", detail::vec(p.center)}, {"radius", p.radius}, {"vertices", vs},
          {"eps", p.eps},         {"alphas", p.alphas},              {"winding", p.winding}, {"positive", p.positive}};
}

inline CyclicPolygon cyclic_from_json(const json& j) {
  using detail::need;
  CyclicPolygon p;
  p.lengths = need(j, "lengths").get<std::vector<double>>();
  p.center = detail::vec_of(need(j, "center"));
  p.radius = detail::real(need(j, "radius"), "radius");
  for (const auto& v : need(j, "vertices")) p.vertices.push_back(detail::vec_of(v));
  p.eps = need(j, "eps").get<std::vector<int>>();
  p.alphas = need(j, "alphas").get<std::vector<double>>();
  p.winding = need(j, "winding").get<int>();
  p.positive = need(j, "positive").get<int>();
  return p;
}

// ---------------------------------------------------------------------------
// SP trees

inline json to_json(const SPNode& n) {
  switch (n.kind) {
    case SPKind::Edge: return {{"op", "E"}, {"edge", n.edge}, {"from", n.from}, {"to", n.to}};
    case SPKind::Series:
    case SPKind::Parallel: {
      json ch = json::array();
      for (const auto& c : n.children) ch.push_back(to_json(c));
      return {{"op", n.kind == SPKind::Series ? "S" : "P"}, {"from", n.from}, {"to", n.to}, {"children", ch}};
    }
  }
  return {};
}

inline json to_json(const SPTree& t) { return to_json(t.root); }

inline SPNode sp_node_from_json(const json& j) {
  using detail::need;
  SPNode n;
  const std::string op = need(j, "op").get<std::string>();
  n.from = detail::id_of(need(j, "from"));
  n.to = detail::id_of(need(j, "to"));
  if (op == "E") {
    n.kind = SPKind::Edge;
    n.edge = need(j, "edge").get<std::size_t>();
  } else if (op == "S" || op == "P") {
    n.kind = op == "S" ? SPKind::Series : SPKind::Parallel;
    for (const auto& c : need(j, "children")) n.children.push_back(sp_node_from_json(c));
  } else {
    linkarea::detail::fail(ErrorKind::ParseError, "unknown SP op " + op);
  }
  return n;
}

inline SPTree sp_tree_from_json(const json& j) { return {sp_node_from_json(j)}; }

// ---------------------------------------------------------------------------
// reports

inline json to_json(const WallReport& r, const LinkageGraph& g) {
  json hits = json::array();
  for (const auto& h : r.hits) {
    json edges = json::array();
    for (std::size_t e : h.cycle_edges) edges.push_back(g.edges()[e].u + "-" + g.edges()[e].v);
    hits.push_back({{"edges", edges}, {"signs", h.signs}, {"value", h.value}});
  }
  return {{"clean", r.clean()}, {"min_margin", r.min_margin}, {"cycles_checked", r.cycles_checked}, {"hits", hits}};
}

inline json to_json(const InertiaTriple& t) {
  return {{"negative", t.negative}, {"zero", t.zero}, {"positive", t.positive}, {"eigenvalues", t.eigenvalues},
          {"zero_band", t.zero_band}, {"gap", std::isfinite(t.gap) ? json(t.gap) : json(nullptr)}};
}

inline InertiaTriple inertia_from_json(const json& j) {
  InertiaTriple t;
  t.negative = detail::need(j, "negative").get<int>();
  t.zero = detail::need(j, "zero").get<int>();
  t.positive = detail::need(j, "positive").get<int>();
  if (j.contains("eigenvalues")) t.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  if (j.contains("zero_band")) t.zero_band = j.at("zero_band").get<double>();
  t.gap = j.contains("gap") && j.at("gap").is_number() ? j.at("gap").get<double>() : std::numeric_limits<double>::infinity();
  return t;
}

// ---------------------------------------------------------------------------
// critical records

inline json to_json(const CriticalRecord& r) {
  json chains = json::array();
  for (const auto& c : r.chains) {
    json jc = {{"path", c.path}, {"aligned", c.aligned}, {"w", c.w}};
    if (c.aligned) {
      jc["signs"] = c.signs;
      jc["forward"] = c.forward;
      jc["nu"] = c.nu;
    } else if (c.elbow != 0) {
      jc["elbow"] = c.elbow;
    }
    chains.push_back(jc);
  }
  json cells = json::array();
  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    json jc = to_json(r.cells[k]);
    jc["cycle"] = k < r.cell_vertices.size() ? json(r.cell_vertices[k]) : json::array();
    cells.push_back(jc);
  }
  json breakdown = json::array();
  for (const auto& [label, v] : r.index.breakdown) breakdown.push_back({{"term", label}, {"value", v}});
  json factors = json::array();
  for (const auto& f : r.factors)
    factors.push_back({{"label", f.label}, {"lengths", f.lengths}, {"dimension", f.dimension},
                       {"euler", f.euler ? json(*f.euler) : json(nullptr)}});
  return {{"kind", r.kind_key},         {"index", r.index.index},      {"manifold_dim", r.manifold_dim},
          {"area", r.area},             {"breakdown", breakdown},      {"chains", chains},
          {"cells", cells},             {"factors", factors},          {"rigid_vertices", r.rigid_vertices},
          {"representative", to_json(r.representative)}};
}

inline CriticalRecord record_from_json(const json& j) {
  using detail::need;
  CriticalRecord r;
  r.kind_key = need(j, "kind").get<std::string>();
  r.index.index = need(j, "index").get<int>();
  r.manifold_dim = need(j, "manifold_dim").get<int>();
  r.index.manifold_dim = r.manifold_dim;
  r.area = detail::real(need(j, "area"), "area");
  if (j.contains("breakdown"))
    for (const auto& b : j.at("breakdown")) r.index.breakdown.emplace_back(need(b, "term").get<std::string>(), need(b, "value").get<int>());
  if (j.contains("chains"))
    for (const auto& c : j.at("chains")) {
      ChainStatus st;
      for (const auto& v : need(c, "path")) st.path.push_back(detail::id_of(v));
      st.aligned = need(c, "aligned").get<bool>();
      st.w = detail::real(need(c, "w"), "w");
      if (c.contains("signs")) st.signs = c.at("signs").get<std::vector<int>>();
      if (c.contains("forward")) st.forward = c.at("forward").get<int>();
      if (c.contains("nu")) st.nu = c.at("nu").get<int>();
      if (c.contains("elbow")) st.elbow = c.at("elbow").get<int>();
      r.chains.push_back(st);
    }
  if (j.contains("cells"))
    for (const auto& c : j.at("cells")) {
      r.cells.push_back(cyclic_from_json(c));
      std::vector<VertexId> cyc;
      if (c.contains("cycle"))
        for (const auto& v : c.at("cycle")) cyc.push_back(detail::id_of(v));
      r.cell_vertices.push_back(cyc);
    }
  if (j.contains("factors"))
    for (const auto& f : j.at("factors")) {
      ManifoldFactor mf{need(f, "label").get<std::string>(), need(f, "lengths").get<std::vector<double>>(),
                        need(f, "dimension").get<int>(), std::nullopt};
      if (f.contains("euler") && f.at("euler").is_number_integer()) mf.euler = f.at("euler").get<int>();
      r.factors.push_back(mf);
    }
  for (const auto& v : need(j, "rigid_vertices")) r.rigid_vertices.push_back(detail::id_of(v));
  r.representative = configuration_from_json(need(j, "representative"));
  return r;
}

inline json to_json(const std::vector<CriticalRecord>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

inline std::vector<CriticalRecord> records_from_json(const json& j) {
  if (!j.is_array()) linkarea::detail::fail(ErrorKind::ParseError, "records must be an array");
  std::vector<CriticalRecord> out;
  for (const auto& r : j) out.push_back(record_from_json(r));
  return out;
}

// ---------------------------------------------------------------------------
// branch diagrams

inline json to_json(const BranchDiagram& d) {
  json cols = json::array();
  for (const auto& c : d.columns) {
    json pts = json::array();
    for (const auto& p : c.points)
      pts.push_back({{"branch", p.branch}, {"kind", p.kind}, {"area", p.area}, {"inertia", to_json(p.inertia)},
                     {"configuration", to_json(p.configuration)}});
    cols.push_back({{"parameter", c.parameter}, {"points", pts}});
  }
  json branches = json::array();
  for (const auto& b : d.branches)
    branches.push_back({{"id", b.id}, {"first", b.first}, {"last", b.last},
                        {"parent", b.parent ? json(*b.parent) : json(nullptr)}, {"fate", b.fate}});
  json events = json::array();
  for (const auto& e : d.events)
    events.push_back({{"parameter", e.parameter}, {"type", to_string(e.type)}, {"branch", e.branch},
                      {"children", e.children}, {"negative_before", e.negative_before},
                      {"negative_after", e.negative_after}, {"method", e.method}});
  return {{"edge", d.edge}, {"edge_label", d.edge_label}, {"columns", cols}, {"branches", branches},
          {"events", events}, {"warnings", d.warnings}};
}

inline std::string to_csv(const BranchDiagram& d) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "parameter,branch,S,neg,zero,pos\n";
  for (const auto& c : d.columns)
    for (const auto& p : c.points)
      os << c.parameter << "," << p.branch << "," << p.area << "," << p.inertia.negative << "," << p.inertia.zero << ","
         << p.inertia.positive << "\n";
  return os.str();
}

}  // namespace linkarea::io
