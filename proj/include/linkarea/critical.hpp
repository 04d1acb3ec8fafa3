#pragma once

// Symbolic enumeration of the critical points of the oriented area for
// three-chains and polygons with non-crossing diagonal chains.
//
// A critical configuration is fixed by choosing which attached chains are
// aligned (and how their edges fold along the line), after which every cell
// cut out by the straight diagonals is an independent cyclic polygon. Chains
// left free only need their endpoint distance to be reachable; they sweep out
// the critical manifold.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "linkarea/cyclic.hpp"
#include "linkarea/errors.hpp"
#include "linkarea/geometry.hpp"
#include "linkarea/graph.hpp"
#include "linkarea/indices.hpp"

namespace linkarea {

// ---------------------------------------------------------------------------
// Linkage classes

struct AttachedChain {
  std::vector<VertexId> vertices;  // from the earlier attachment on the cycle to the later one
  std::vector<std::size_t> edges;
  std::vector<double> lengths;
  std::size_t lo = 0, hi = 0;  // attachment positions on the cycle, lo < hi

  int size() const noexcept { return static_cast<int>(lengths.size()); }
};

struct PolygonWithDiagonals {
  LinkageGraph graph;
  DistinguishedCycle gamma;
  std::vector<AttachedChain> chains;

  std::vector<double> cycle_lengths() const {
    std::vector<double> l;
    for (std::size_t e : gamma.edges) l.push_back(graph.edges()[e].length);
    return l;
  }
};

/// Accepts a linkage whose non-cycle part consists of paths joining two cycle
/// vertices with pairwise non-crossing endpoint pairs. UnsupportedClass otherwise.
inline PolygonWithDiagonals recognize_pnd(const LinkageGraph& g, const DistinguishedCycle& gamma) {
  RelativeDecomposition rd;
  try {
    rd = relative_decomposition(g, gamma);
  } catch (const Error& e) {
    detail::fail(ErrorKind::UnsupportedClass, std::string("not a polygon with diagonal chains: ") + e.what());
  }
  std::map<VertexId, std::size_t> pos;
  for (std::size_t k = 0; k < gamma.size(); ++k) pos[gamma.vertices[k]] = k;
  PolygonWithDiagonals out{g, gamma, {}};
  for (const auto& comp : rd.components) {
    auto path = as_attached_path(comp);
    if (!path) detail::fail(ErrorKind::UnsupportedClass, "an attached component is not a path between two cycle vertices");
    AttachedChain ch;
    ch.vertices = path->vertices;
    ch.edges = path->edges;
    for (std::size_t e : ch.edges) ch.lengths.push_back(g.edges()[e].length);
    ch.lo = pos.at(ch.vertices.front());
    ch.hi = pos.at(ch.vertices.back());
    if (ch.lo > ch.hi) {
      std::reverse(ch.vertices.begin(), ch.vertices.end());
      std::reverse(ch.edges.begin(), ch.edges.end());
      std::reverse(ch.lengths.begin(), ch.lengths.end());
      std::swap(ch.lo, ch.hi);
    }
    out.chains.push_back(std::move(ch));
  }
  for (std::size_t a = 0; a < out.chains.size(); ++a)
    for (std::size_t b = a + 1; b < out.chains.size(); ++b)
      if (diagonals_cross(out.chains[a].lo, out.chains[a].hi, out.chains[b].lo, out.chains[b].hi))
        detail::fail(ErrorKind::UnsupportedClass, "attached chains cross in the cyclic order");
  return out;
}

/// Three-chain [p,q;r]: chains A, B, Z joining I to T. The distinguished cycle
/// runs I, A1, ..., T, ..., B1.
struct ThreeChain {
  std::vector<double> a, b, z;

  static std::vector<VertexId> interior(const std::string& prefix, std::size_t edges) {
    std::vector<VertexId> vs;
    for (std::size_t k = 1; k < edges; ++k) vs.push_back(prefix + std::to_string(k));
    return vs;
  }

  LinkageGraph linkage() const {
    if (a.empty() || b.empty() || z.empty() || a.size() + b.size() < 3)
      detail::fail(ErrorKind::InvalidInput, "three-chain needs p, q, r >= 1 and p + q >= 3");
    std::vector<VertexId> vs{"I", "T"};
    std::vector<Edge> es;
    auto add = [&](const std::string& prefix, const std::vector<double>& l) {
      const auto mid = interior(prefix, l.size());
      vs.insert(vs.end(), mid.begin(), mid.end());
      std::vector<VertexId> path{"I"};
      path.insert(path.end(), mid.begin(), mid.end());
      path.push_back("T");
      for (std::size_t k = 0; k < l.size(); ++k) es.push_back({path[k], path[k + 1], l[k]});
    };
    add("A", a);
    add("B", b);
    add("Z", z);
    return LinkageGraph(vs, es);
  }

  std::vector<VertexId> gamma_vertices() const {
    std::vector<VertexId> c{"I"};
    for (const auto& v : interior("A", a.size())) c.push_back(v);
    c.push_back("T");
    auto bs = interior("B", b.size());
    c.insert(c.end(), bs.rbegin(), bs.rend());
    return c;
  }

  DistinguishedCycle gamma(const LinkageGraph& g) const { return make_cycle(g, gamma_vertices()); }

  std::vector<VertexId> z_path() const {
    std::vector<VertexId> p{"I"};
    for (const auto& v : interior("Z", z.size())) p.push_back(v);
    p.push_back("T");
    return p;
  }
};

// ---------------------------------------------------------------------------
// Records

struct ChainStatus {
  std::vector<VertexId> path;
  bool aligned = false;
  std::vector<int> signs;  // per edge, +1 when it points from the first attachment toward the second
  int forward = 0;
  double w = 0.0;          // straight diagonal length (aligned) or endpoint distance (free)
  int nu = 0;
  int elbow = 0;           // two-edge free chains: +1 left, -1 right
};

/// Reduced configuration space of a polygon swept by a free chain closed by its diagonal.
struct ManifoldFactor {
  std::string label;
  std::vector<double> lengths;  // chain lengths followed by the diagonal
  int dimension = 0;
  std::optional<int> euler;     // known for points and one-dimensional spaces only
};

struct CriticalRecord {
  std::vector<ChainStatus> chains;
  std::vector<CyclicPolygon> cells;                // in the frame of `representative`
  std::vector<std::vector<VertexId>> cell_vertices;
  Configuration representative;
  IndexReport index;
  int manifold_dim = 0;
  std::vector<ManifoldFactor> factors;
  double area = 0.0;
  std::vector<VertexId> rigid_vertices;  // vertices that do not move along the critical manifold
  std::string kind_key;
};

struct EnumerationOptions {
  CyclicOptions cyclic;
  Tolerances tol;
  double reach_margin = 1e-9;  // relative to the total length
  bool strict = false;         // NonGeneric raises instead of warning
};

struct Enumeration {
  std::vector<CriticalRecord> records;
  std::vector<std::string> warnings;
};

namespace detail {

struct Rigid {
  double angle = 0.0;
  Vec2 shift = Vec2::Zero();
  Vec2 apply(const Vec2& p) const { return rotated(p, angle) + shift; }
};

/// Proper rigid motion carrying (a0, a1) onto (b0, b1); the pairs have equal length.
inline Rigid align_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const Vec2 da = a1 - a0, db = b1 - b0;
  Rigid r;
  r.angle = std::atan2(cross(da, db), da.dot(db));
  r.shift = b0 - rotated(a0, r.angle);
  return r;
}

inline CyclicPolygon moved(CyclicPolygon p, const Rigid& r) {
  p.center = r.apply(p.center);
  for (Vec2& v : p.vertices) v = r.apply(v);
  return p;
}

/// Interior point placement of an open chain between fixed endpoints: each
/// joint goes to the middle of the distances the rest of the chain can still
/// reach, bending to the left. `elbow` picks the side for the last joint.
inline std::vector<Vec2> place_free_chain(const Vec2& s, const Vec2& t, const std::vector<double>& l, int elbow = 1) {
  std::vector<Vec2> pts{s};
  Vec2 cur = s;
  for (std::size_t k = 0; k + 1 < l.size(); ++k) {
    const double d = (t - cur).norm();
    const std::vector<double> rest(l.begin() + static_cast<std::ptrdiff_t>(k) + 1, l.end());
    const ReachInterval reach = chain_reach(rest);
    const double c = l[k];
    double target;
    int side = 1;
    if (rest.size() == 1) {
      target = rest[0];
      side = elbow;
    } else {
      const double lo = std::max(std::abs(d - c), reach.dmin), hi = std::min(d + c, reach.dmax);
      target = 0.5 * (lo + hi);
    }
    const double cos_phi = std::clamp((c * c + d * d - target * target) / (2.0 * c * d), -1.0, 1.0);
    const Vec2 dir = (t - cur) / d;
    cur = cur + c * rotated(dir, side * std::acos(cos_phi));
    pts.push_back(cur);
  }
  pts.push_back(t);
  return pts;
}

inline std::string sign_string(const std::vector<int>& s) {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

inline std::string cell_key(const CyclicPolygon& p) { return sign_string(p.eps) + "/" + std::to_string(p.winding); }

inline double perimeter(const std::vector<double>& l) {
  double s = 0.0;
  for (double x : l) s += x;
  return s;
}

class CyclicCache {
 public:
  explicit CyclicCache(const CyclicOptions& opts) : opts_(opts) {}
  const std::vector<CyclicPolygon>& get(const std::vector<double>& lengths, std::vector<std::string>& warnings) {
    auto it = cache_.find(lengths);
    if (it != cache_.end()) return it->second;
    std::vector<CyclicPolygon> sols;
    try {
      sols = enumerate_cyclic(lengths, opts_, &warnings);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidInput) throw;  // a cell that cannot close has no solutions
    }
    return cache_.emplace(lengths, std::move(sols)).first->second;
  }

 private:
  CyclicOptions opts_;
  std::map<std::vector<double>, std::vector<CyclicPolygon>> cache_;
};

inline void nongeneric(const EnumerationOptions& opts, std::vector<std::string>& warnings, const std::string& what) {
  if (opts.strict) fail(ErrorKind::NonGeneric, what);
  warnings.push_back("NonGeneric: " + what);
}

inline std::vector<std::vector<int>> positive_sign_patterns(const std::vector<double>& l) {
  std::vector<std::vector<int>> out;
  const std::size_t r = l.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
    std::vector<int> s(r);
    double w = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      s[k] = ((mask >> k) & 1U) ? -1 : 1;
      w += s[k] * l[k];
    }
    if (w > 0.0) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Records of a polygon with diagonal chains (three-chains and plain polygons included).
inline Enumeration enumerate_critical_pnd(const PolygonWithDiagonals& pnd, const EnumerationOptions& opts = {}) {
  using detail::Rigid;
  Enumeration out;
  const LinkageGraph& g = pnd.graph;
  const DistinguishedCycle& gamma = pnd.gamma;
  const std::size_t nc = pnd.chains.size();
  if (nc > 12) detail::fail(ErrorKind::InvalidInput, "too many attached chains for symbolic enumeration");
  const double total = g.total_length();
  detail::CyclicCache cache(opts.cyclic);
  const std::vector<double> cycle_len = pnd.cycle_lengths();

  for (std::size_t subset = 0; subset < (std::size_t{1} << nc); ++subset) {
    std::vector<std::size_t> aligned, free_chains;
    bool valid = true;
    for (std::size_t c = 0; c < nc; ++c) {
      if ((subset >> c) & 1U) {
        aligned.push_back(c);
      } else {
        free_chains.push_back(c);
        if (pnd.chains[c].size() == 1) valid = false;  // a single bar is always straight
      }
    }
    if (!valid) continue;
    // two aligned chains on the same pair would bound a two-sided cell
    for (std::size_t x = 0; x < aligned.size() && valid; ++x)
      for (std::size_t y = x + 1; y < aligned.size() && valid; ++y)
        valid = !(pnd.chains[aligned[x]].lo == pnd.chains[aligned[y]].lo &&
                  pnd.chains[aligned[x]].hi == pnd.chains[aligned[y]].hi);
    if (!valid) continue;

    std::vector<std::pair<VertexId, VertexId>> diagonals;
    for (std::size_t c : aligned)
      diagonals.emplace_back(gamma.vertices[pnd.chains[c].lo], gamma.vertices[pnd.chains[c].hi]);
    const std::vector<ElementaryCycle> cells = elementary_cycles(gamma, diagonals);
    if (std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c.vertices.size() < 3; })) continue;

    // cell k closes with diagonal `closing[k]`; `opening[d]` is the cell walking d forward
    std::vector<std::size_t> closing_cell(aligned.size()), opening_cell(aligned.size());
    for (std::size_t k = 0; k < cells.size(); ++k)
      for (const auto& s : cells[k].segments)
        if (s.kind == CellSegment::Kind::Diagonal) {
          const bool forward = s.from == gamma.vertices[pnd.chains[aligned[s.index]].lo];
          (forward ? opening_cell : closing_cell)[s.index] = k;
        }

    std::vector<std::vector<int>> pattern_choices;
    std::vector<std::vector<std::vector<int>>> patterns;
    for (std::size_t c : aligned) patterns.push_back(detail::positive_sign_patterns(pnd.chains[c].lengths));
    std::vector<std::size_t> pick(aligned.size(), 0);
    while (true) {
      std::vector<double> w(aligned.size());
      for (std::size_t d = 0; d < aligned.size(); ++d) {
        const auto& s = patterns[d][pick[d]];
        for (std::size_t k = 0; k < s.size(); ++k) w[d] += s[k] * pnd.chains[aligned[d]].lengths[k];
      }
      // solve every cell
      std::vector<const std::vector<CyclicPolygon>*> sols;
      bool feasible = true;
      for (const auto& cell : cells) {
        std::vector<double> l;
        for (const auto& s : cell.segments)
          l.push_back(s.kind == CellSegment::Kind::CycleEdge ? cycle_len[s.index] : w[s.index]);
        const auto& sv = cache.get(l, out.warnings);
        if (sv.empty()) feasible = false;
        sols.push_back(&sv);
      }
      std::vector<std::size_t> choice(cells.size(), 0);
      while (feasible) {
        // glue cells, parents first
        Configuration conf;
        std::vector<CyclicPolygon> placed(cells.size());
        bool ok = true;
        for (std::size_t k = 0; k < cells.size() && ok; ++k) {
          const CyclicPolygon& p = (*sols[k])[choice[k]];
          Rigid r;
          if (k > 0) {
            const VertexId& a = cells[k].vertices.front();
            const VertexId& b = cells[k].vertices.back();
            r = detail::align_segment(p.vertices.front(), p.vertices.back(), conf.at(a), conf.at(b));
          }
          placed[k] = detail::moved(p, r);
          for (std::size_t v = 0; v < cells[k].vertices.size(); ++v) {
            const VertexId& id = cells[k].vertices[v];
            if (k == 0 || !conf.coords.count(id)) conf[id] = placed[k].vertices[v];
          }
        }
        // aligned chains
        std::vector<ChainStatus> status(nc);
        std::vector<int> nus;
        for (std::size_t d = 0; d < aligned.size() && ok; ++d) {
          const AttachedChain& ch = pnd.chains[aligned[d]];
          const auto& s = patterns[d][pick[d]];
          const Vec2 from = conf.at(ch.vertices.front()), to = conf.at(ch.vertices.back());
          const Vec2 dir = (to - from) / w[d];
          Vec2 cur = from;
          for (std::size_t k = 0; k + 1 < ch.vertices.size(); ++k) {
            if (k > 0) conf[ch.vertices[k]] = cur;
            cur += s[k] * ch.lengths[k] * dir;
          }
          ChainStatus& st = status[aligned[d]];
          st.path = ch.vertices;
          st.aligned = true;
          st.signs = s;
          st.forward = static_cast<int>(std::count(s.begin(), s.end(), 1));
          st.w = w[d];
          const OpenChainCritical z{ch.size(), st.forward, to - from};
          try {
            st.nu = aligned_nu(z, placed[closing_cell[d]].center, placed[opening_cell[d]].center,
                               opts.tol.concyclic * total);
          } catch (const Error&) {
            detail::nongeneric(opts, out.warnings, "circumcenters of the cells beside a straight chain coincide");
            ok = false;
          }
          nus.push_back(st.nu);
        }
        // free chains: endpoint distance must be strictly reachable
        std::vector<std::vector<int>> elbow_options{{}};
        for (std::size_t c : free_chains) {
          if (!ok) break;
          const AttachedChain& ch = pnd.chains[c];
          const double d = (conf.at(ch.vertices.back()) - conf.at(ch.vertices.front())).norm();
          const ReachInterval reach = chain_reach(ch.lengths);
          const double margin = opts.reach_margin * total;
          if (!reach.strictly_contains(d, margin)) {
            if (reach.strictly_contains(d, -margin))
              detail::nongeneric(opts, out.warnings, "free chain endpoint distance on the boundary of its reach");
            ok = false;
            break;
          }
          ChainStatus& st = status[c];
          st.path = ch.vertices;
          st.w = d;
          std::vector<std::vector<int>> next;
          for (const auto& e : elbow_options)
            for (int side : (ch.size() == 2 ? std::vector<int>{1, -1} : std::vector<int>{1})) {
              auto ne = e;
              ne.push_back(side);
              next.push_back(ne);
            }
          elbow_options = std::move(next);
        }
        if (ok) {
          std::vector<int> mus;
          try {
            for (const auto& p : placed) mus.push_back(cyclic_index(p));
          } catch (const Error& e) {
            detail::nongeneric(opts, out.warnings, std::string("degenerate cell: ") + e.what());
            ok = false;
          }
          for (const auto& elbows : elbow_options) {
            if (!ok) break;
            CriticalRecord r;
            r.chains = status;
            r.representative = conf;
            std::vector<VertexId> moving;
            for (std::size_t f = 0; f < free_chains.size(); ++f) {
              const AttachedChain& ch = pnd.chains[free_chains[f]];
              const auto pts = detail::place_free_chain(conf.at(ch.vertices.front()), conf.at(ch.vertices.back()),
                                                        ch.lengths, elbows[f]);
              for (std::size_t k = 1; k + 1 < ch.vertices.size(); ++k) r.representative[ch.vertices[k]] = pts[k];
              ChainStatus& st = r.chains[free_chains[f]];
              if (ch.size() == 2) {
                st.elbow = elbows[f];
              } else {
                for (std::size_t k = 1; k + 1 < ch.vertices.size(); ++k) moving.push_back(ch.vertices[k]);
                std::vector<double> fl = ch.lengths;
                fl.push_back(st.w);
                ManifoldFactor mf{"chain " + ch.vertices.front() + "-" + ch.vertices.back(), fl, ch.size() - 2,
                                  std::nullopt};
                if (ch.size() == 3) mf.euler = 0;
                r.factors.push_back(std::move(mf));
                r.manifold_dim += ch.size() - 2;
              }
            }
            for (const auto& v : g.vertices())
              if (std::find(moving.begin(), moving.end(), v) == moving.end()) r.rigid_vertices.push_back(v);
            r.cells = placed;
            for (const auto& c : cells) r.cell_vertices.push_back(c.vertices);
            r.index.index = ptt_index(mus, nus);
            r.index.manifold_dim = r.manifold_dim;
            for (std::size_t k = 0; k < mus.size(); ++k) r.index.breakdown.emplace_back("cell " + std::to_string(k), mus[k]);
            for (std::size_t d = 0; d < aligned.size(); ++d) {
              const AttachedChain& ch = pnd.chains[aligned[d]];
              r.index.breakdown.emplace_back("chain " + ch.vertices.front() + "-" + ch.vertices.back(), nus[d]);
            }
            r.area = oriented_area(r.representative, gamma);
            std::ostringstream key;
            key << "chains[";
            for (std::size_t c = 0; c < nc; ++c) {
              const ChainStatus& st = r.chains[c];
              if (c) key << ",";
              if (st.aligned) key << "A" << detail::sign_string(st.signs);
              else key << "F" << (st.elbow > 0 ? "L" : st.elbow < 0 ? "R" : "");
            }
            key << "]cells[";
            for (std::size_t k = 0; k < placed.size(); ++k) key << (k ? "," : "") << detail::cell_key(placed[k]);
            key << "]";
            r.kind_key = key.str();
            out.records.push_back(std::move(r));
          }
        }
        // next combination of cell solutions
        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == sols[k]->size()) choice[k++] = 0;
        if (k == choice.size()) break;
      }
      std::size_t d = 0;
      while (d < pick.size() && ++pick[d] == patterns[d].size()) pick[d++] = 0;
      if (d == pick.size()) break;
    }
  }
  std::sort(out.records.begin(), out.records.end(), [](const CriticalRecord& a, const CriticalRecord& b) {
    if (a.index.index != b.index.index) return a.index.index < b.index.index;
    if (a.kind_key != b.kind_key) return a.kind_key < b.kind_key;
    return a.area < b.area;
  });
  return out;
}

/// Direct enumeration for [p,q;r]: circular type (the cycle is cyclic, Z free)
/// and aligned type (Z straight, both halves cyclic).
inline Enumeration enumerate_critical_three_chain(const ThreeChain& tc, const EnumerationOptions& opts = {}) {
  using detail::Rigid;
  const LinkageGraph g = tc.linkage();
  const DistinguishedCycle gamma = tc.gamma(g);
  const std::vector<VertexId> gv = gamma.vertices;
  const std::vector<VertexId> zp = tc.z_path();
  const std::size_t p = tc.a.size(), r = tc.z.size();
  const double total = g.total_length();
  Enumeration out;

  auto finish = [&](CriticalRecord& rec) {
    rec.area = oriented_area(rec.representative, gamma);
    rec.index.manifold_dim = rec.manifold_dim;
    std::vector<VertexId> moving;
    if (!rec.chains[0].aligned && r >= 3) moving.assign(zp.begin() + 1, zp.end() - 1);
    for (const auto& v : g.vertices())
      if (std::find(moving.begin(), moving.end(), v) == moving.end()) rec.rigid_vertices.push_back(v);
    std::ostringstream key;
    const ChainStatus& st = rec.chains[0];
    key << "chains[";
    if (st.aligned) key << "A" << detail::sign_string(st.signs);
    else key << "F" << (st.elbow > 0 ? "L" : st.elbow < 0 ? "R" : "");
    key << "]cells[";
    for (std::size_t k = 0; k < rec.cells.size(); ++k) key << (k ? "," : "") << detail::cell_key(rec.cells[k]);
    key << "]";
    rec.kind_key = key.str();
    out.records.push_back(std::move(rec));
  };

  // circular type
  if (r >= 2) {
    std::vector<double> gl = tc.a;
    gl.insert(gl.end(), tc.b.rbegin(), tc.b.rend());
    const ReachInterval reach = chain_reach(tc.z);
    for (const auto& poly : enumerate_cyclic(gl, opts.cyclic, &out.warnings)) {
      const double d = (poly.vertices[p] - poly.vertices[0]).norm();
      const double margin = opts.reach_margin * total;
      if (!reach.strictly_contains(d, margin)) {
        if (reach.strictly_contains(d, -margin))
          detail::nongeneric(opts, out.warnings, "diagonal I-T on the boundary of the reach of Z");
        continue;
      }
      int mu;
      try {
        mu = cyclic_index(poly);
      } catch (const Error& e) {
        detail::nongeneric(opts, out.warnings, e.what());
        continue;
      }
      for (int side : (r == 2 ? std::vector<int>{1, -1} : std::vector<int>{1})) {
        CriticalRecord rec;
        for (std::size_t k = 0; k < gv.size(); ++k) rec.representative[gv[k]] = poly.vertices[k];
        const auto pts = detail::place_free_chain(poly.vertices[0], poly.vertices[p], tc.z, side);
        for (std::size_t k = 1; k + 1 < zp.size(); ++k) rec.representative[zp[k]] = pts[k];
        ChainStatus st;
        st.path = zp;
        st.w = d;
        if (r == 2) st.elbow = side;
        rec.chains.push_back(st);
        rec.cells.push_back(poly);
        rec.cell_vertices.push_back(gv);
        rec.index.index = mu;
        rec.index.breakdown.emplace_back("cell 0", mu);
        if (r >= 3) {
          std::vector<double> fl = tc.z;
          fl.push_back(d);
          ManifoldFactor mf{"chain I-T", fl, static_cast<int>(r) - 2, std::nullopt};
          if (r == 3) mf.euler = 0;
          rec.factors.push_back(mf);
          rec.manifold_dim = static_cast<int>(r) - 2;
        }
        finish(rec);
      }
    }
  }

  // aligned type: cell B = (w, b_q..b_1) walks I -> T, cell A = (a_1..a_p, w) closes T -> I
  for (const auto& s : detail::positive_sign_patterns(tc.z)) {
    double w = 0.0;
    for (std::size_t k = 0; k < r; ++k) w += s[k] * tc.z[k];
    std::vector<double> la = tc.a, lb{w};
    la.push_back(w);
    lb.insert(lb.end(), tc.b.rbegin(), tc.b.rend());
    if (la.size() < 3 || lb.size() < 3) continue;
    std::vector<CyclicPolygon> sa, sb;
    try {
      sa = enumerate_cyclic(la, opts.cyclic, &out.warnings);
      sb = enumerate_cyclic(lb, opts.cyclic, &out.warnings);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidInput) throw;
      continue;
    }
    for (const auto& pb : sb)
      for (const auto& pa0 : sa) {
        // B stays in its own frame: its vertex 0 is I and vertex 1 is T
        const Rigid rt = detail::align_segment(pa0.vertices[0], pa0.vertices[p], pb.vertices[0], pb.vertices[1]);
        const CyclicPolygon pa = detail::moved(pa0, rt);
        CriticalRecord rec;
        for (std::size_t k = 0; k <= p; ++k) rec.representative[gv[k]] = pa.vertices[k];
        for (std::size_t k = 2; k < pb.vertices.size(); ++k) rec.representative[gv[p + k - 1]] = pb.vertices[k];
        const Vec2 dir = (pb.vertices[1] - pb.vertices[0]) / w;
        Vec2 cur = pb.vertices[0];
        for (std::size_t k = 0; k + 1 < r; ++k) {
          cur += s[k] * tc.z[k] * dir;
          rec.representative[zp[k + 1]] = cur;
        }
        ChainStatus st;
        st.path = zp;
        st.aligned = true;
        st.signs = s;
        st.forward = static_cast<int>(std::count(s.begin(), s.end(), 1));
        st.w = w;
        int mu_a, mu_b;
        try {
          st.nu = aligned_nu({static_cast<int>(r), st.forward, pb.vertices[1] - pb.vertices[0]}, pa.center, pb.center,
                             opts.tol.concyclic * total);
          mu_a = cyclic_index(pa);
          mu_b = cyclic_index(pb);
        } catch (const Error& e) {
          detail::nongeneric(opts, out.warnings, e.what());
          continue;
        }
        rec.chains.push_back(st);
        // cell order as in the general enumeration: the cell walking the diagonal forward first
        rec.cells = {pb, pa};
        std::vector<VertexId> cb{"I", "T"}, ca(gv.begin(), gv.begin() + static_cast<std::ptrdiff_t>(p) + 1);
        for (std::size_t k = p + 1; k < gv.size(); ++k) cb.push_back(gv[k]);
        rec.cell_vertices = {cb, ca};
        rec.index.index = three_chain_aligned_index(mu_a, mu_b, st.nu);
        rec.index.breakdown = {{"cell A", mu_a}, {"cell B", mu_b}, {"chain Z", st.nu}};
        finish(rec);
      }
  }
  std::sort(out.records.begin(), out.records.end(), [](const CriticalRecord& a, const CriticalRecord& b) {
    if (a.index.index != b.index.index) return a.index.index < b.index.index;
    if (a.kind_key != b.kind_key) return a.kind_key < b.kind_key;
    return a.area < b.area;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Classification of a given configuration

struct CellVerdict {
  std::vector<VertexId> vertices;
  std::optional<CyclicPolygon> circle;
  double deviation = 0.0;  // distance to the fitted circle, relative to its radius
  std::string problem;
};

struct Classification {
  bool critical = false;
  std::vector<ChainStatus> chains;
  std::vector<CellVerdict> cells;
  std::optional<CriticalRecord> record;  // skeleton with indices, when critical and generic
  std::vector<std::string> notes;
};

inline Classification classify_configuration(const PolygonWithDiagonals& pnd, const Configuration& c,
                                             const Tolerances& tol = {}) {
  Classification out;
  const LinkageGraph& g = pnd.graph;
  const DistinguishedCycle& gamma = pnd.gamma;
  double diameter = 0.0;
  for (const auto& [v, p] : c.coords)
    for (const auto& [u, q] : c.coords) diameter = std::max(diameter, (p - q).norm());
  if (max_length_residual(g, c) > tol.length * g.total_length()) out.notes.push_back("configuration does not realize the edge lengths");

  std::vector<std::pair<VertexId, VertexId>> diagonals;
  std::vector<std::size_t> aligned;
  for (std::size_t k = 0; k < pnd.chains.size(); ++k) {
    const AttachedChain& ch = pnd.chains[k];
    ChainStatus st;
    st.path = ch.vertices;
    const Vec2 from = c.at(ch.vertices.front()), to = c.at(ch.vertices.back());
    st.w = (to - from).norm();
    st.aligned = is_aligned(c, ch.vertices, tol.collinear * std::max(diameter, 1e-300)) && st.w > 0.0;
    if (st.aligned) {
      for (std::size_t e = 0; e + 1 < ch.vertices.size(); ++e) {
        const int s = (c.at(ch.vertices[e + 1]) - c.at(ch.vertices[e])).dot(to - from) > 0 ? 1 : -1;
        st.signs.push_back(s);
        if (s > 0) ++st.forward;
      }
      aligned.push_back(k);
      diagonals.emplace_back(ch.vertices.front(), ch.vertices.back());
    } else if (ch.size() == 2) {
      st.elbow = cross(to - from, c.at(ch.vertices[1]) - from) > 0 ? 1 : -1;
    }
    out.chains.push_back(st);
  }
  // two straight chains on one pair: keep the first as the diagonal
  std::vector<std::pair<VertexId, VertexId>> unique_diagonals;
  std::vector<std::size_t> diagonal_chain;
  for (std::size_t d = 0; d < diagonals.size(); ++d) {
    bool dup = false;
    for (const auto& u : unique_diagonals) dup = dup || u == diagonals[d];
    if (dup) {
      out.notes.push_back("parallel straight chains on one pair (non-generic)");
      continue;
    }
    unique_diagonals.push_back(diagonals[d]);
    diagonal_chain.push_back(aligned[d]);
  }
  const auto cells = elementary_cycles(gamma, unique_diagonals);
  bool all = true;
  for (const auto& cell : cells) {
    CellVerdict v;
    v.vertices = cell.vertices;
    if (cell.vertices.size() < 3) {
      v.problem = "two-sided cell";
      all = false;
    } else {
      try {
        v.circle = circle_data(c, cell.vertices, tol.concyclic);
      } catch (const NotConcyclicError& e) {
        v.deviation = e.radius() > 0 ? e.deviation() / e.radius() : std::numeric_limits<double>::infinity();
        v.problem = "not concyclic";
        all = false;
      } catch (const Error& e) {
        v.problem = e.what();
        all = false;
      }
    }
    out.cells.push_back(std::move(v));
  }
  out.critical = all;
  if (!all) return out;

  // index skeleton
  CriticalRecord rec;
  rec.chains = out.chains;
  rec.representative = c;
  try {
    std::vector<int> mus, nus;
    for (const auto& v : out.cells) {
      rec.cells.push_back(*v.circle);
      rec.cell_vertices.push_back(v.vertices);
      mus.push_back(cyclic_index(*v.circle));
    }
    for (std::size_t d = 0; d < diagonal_chain.size(); ++d) {
      ChainStatus& st = rec.chains[diagonal_chain[d]];
      std::size_t open = 0, close = 0;
      for (std::size_t k = 0; k < cells.size(); ++k)
        for (const auto& s : cells[k].segments)
          if (s.kind == CellSegment::Kind::Diagonal && s.index == d)
            (s.from == unique_diagonals[d].first ? open : close) = k;
      const Vec2 dir = c.at(st.path.back()) - c.at(st.path.front());
      st.nu = aligned_nu({static_cast<int>(st.signs.size()), st.forward, dir}, rec.cells[close].center,
                         rec.cells[open].center, tol.concyclic * g.total_length());
      nus.push_back(st.nu);
    }
    rec.index.index = ptt_index(mus, nus);
    for (std::size_t k = 0; k < pnd.chains.size(); ++k) {
      const auto& st = rec.chains[k];
      if (!st.aligned && pnd.chains[k].size() >= 3) rec.manifold_dim += pnd.chains[k].size() - 2;
    }
    rec.index.manifold_dim = rec.manifold_dim;
    rec.area = oriented_area(c, gamma);
    out.record = std::move(rec);
  } catch (const Error& e) {
    out.notes.push_back(std::string("index unavailable: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Euler bookkeeping

struct EulerSum {
  std::optional<int> value;
  std::vector<std::string> unknown;  // factors whose Euler characteristic is not known
};

/// sum over records of (-1)^index * chi(critical manifold).
inline EulerSum euler_sum(const std::vector<CriticalRecord>& records) {
  EulerSum out;
  int total = 0;
  for (const auto& r : records) {
    int chi = 1;
    bool zero = false;
    std::vector<std::string> unknown;
    for (const auto& f : r.factors) {
      if (!f.euler) unknown.push_back(r.kind_key + ": " + f.label);
      else if (*f.euler == 0) zero = true;
      else chi *= *f.euler;
    }
    if (zero) continue;  // a circle factor kills the product whatever the rest is
    out.unknown.insert(out.unknown.end(), unknown.begin(), unknown.end());
    total += (r.index.index % 2 == 0 ? 1 : -1) * chi;
  }
  if (out.unknown.empty()) out.value = total;
  return out;
}

}  // namespace linkarea
