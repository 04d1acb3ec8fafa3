#pragma once

// One-parameter continuation of critical points of the oriented area in one
// edge length. Branches are followed by secant prediction and Newton
// correction; every column is rescanned for branches that appear. Inertia
// changes along a branch are located by bisection and attributed to splits or
// merges when two branches are born from (or end at) the changing one.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linkarea/critical.hpp"
#include "linkarea/oracle.hpp"

namespace linkarea {

enum class EventType { PitchforkSplit, PitchforkMerge, HessianZero };

inline const char* to_string(EventType t) {
  switch (t) {
    case EventType::PitchforkSplit: return "PitchforkSplit";
    case EventType::PitchforkMerge: return "PitchforkMerge";
    case EventType::HessianZero: return "HessianZero";
  }
  return "?";
}

struct BranchPoint {
  std::size_t branch = 0;
  VectorXd x;
  Configuration configuration;
  double area = 0.0;
  InertiaTriple inertia;
  std::string kind;  // "aligned", "circular", or empty outside the symbolic classes
};

struct DiagramColumn {
  double parameter = 0.0;
  std::vector<BranchPoint> points;
};

struct BranchEvent {
  double parameter = 0.0;
  EventType type = EventType::HessianZero;
  std::size_t branch = 0;
  std::vector<std::size_t> children;  // born at a split, absorbed at a merge
  int negative_before = 0;
  int negative_after = 0;
  std::string method;  // how the parameter was located
};

struct BranchInfo {
  std::size_t id = 0;
  double first = 0.0;
  double last = 0.0;
  std::optional<std::size_t> parent;
  std::string fate = "alive";  // alive | lost | merged
};

struct BranchDiagram {
  std::size_t edge = 0;
  std::string edge_label;
  std::vector<DiagramColumn> columns;
  std::vector<BranchInfo> branches;
  std::vector<BranchEvent> events;
  std::vector<std::string> warnings;

  std::size_t count(EventType t) const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const BranchEvent& e) { return e.type == t; }));
  }
};

struct ContinuationOptions {
  OracleOptions oracle;             // seeds for the first column
  std::size_t rescan_seeds = 300;   // seeds for every later column
  std::size_t local_seeds = 40;     // extra seeds around a branch whose inertia changed
  int max_halvings = 10;
  double corrector_tol = 0.02;      // largest accepted corrector move, times total length
  double bisection_tol = 1e-13;
};

namespace detail {

class Family {
 public:
  Family(const LinkageGraph& g, std::vector<VertexId> gamma, std::size_t edge, const ContinuationOptions& opts)
      : base_(g), gamma_(std::move(gamma)), edge_(edge), opts_(opts), gauge_(AngleChart(g).gauge()) {
    try {
      pnd_ = recognize_pnd(g, make_cycle(g, gamma_));
    } catch (const Error&) {
    }
  }

  AngleChart chart(double t) const { return AngleChart(base_.with_length(edge_, t), gauge_); }
  TrigObjective objective(const AngleChart& c) const { return area_objective(c, gamma_); }
  double total(double t) const { return base_.with_length(edge_, t).total_length(); }

  std::optional<VectorXd> correct(double t, const VectorXd& pred) const {
    const AngleChart c = chart(t);
    VectorXd x;
    try {
      x = project_to_manifold(c, pred);
    } catch (const Error&) {
      return std::nullopt;
    }
    auto out = newton_critical(c, objective(c), x, opts_.oracle);
    if (!out || chart_distance(c, *out, pred) > opts_.corrector_tol * total(t)) return std::nullopt;
    return out;
  }

  /// Follows x0 (critical at t0) to t1; xp at tp is the previous point for the secant.
  std::optional<VectorXd> track(double t0, const VectorXd& x0, std::optional<std::pair<double, VectorXd>> prev,
                                double t1, double* reached) const {
    // without a secant the first steps are short: new branches leave a split like sqrt(t)
    double t = t0, h = prev ? t1 - t0 : (t1 - t0) / 64.0;
    VectorXd x = x0;
    int halvings = 0;
    while (t != t1) {
      const double tn = std::abs(t1 - t) <= std::abs(h) ? t1 : t + h;
      VectorXd pred = x;
      if (prev && prev->first != t) pred = x + (x - prev->second) * ((tn - t) / (t - prev->first));
      auto xn = correct(tn, pred);
      if (!xn && prev) xn = correct(tn, x);  // plain continuation as a fallback
      if (!xn) {
        if (++halvings > opts_.max_halvings) {
          if (reached) *reached = t;
          return std::nullopt;
        }
        h *= 0.5;
        continue;
      }
      prev = std::make_pair(t, x);
      t = tn;
      x = *xn;
      h *= 2.0;
      if (std::abs(h) > std::abs(t1 - t0)) h = t1 - t0;
    }
    if (reached) *reached = t1;
    return x;
  }

  BranchPoint describe(double t, const VectorXd& x, std::size_t branch) const {
    const AngleChart c = chart(t);
    const NumericCritical nc = describe_critical(c, objective(c), x, opts_.oracle);
    BranchPoint p;
    p.branch = branch;
    p.x = x;
    p.configuration = nc.configuration;
    p.area = nc.value;
    p.inertia = nc.inertia;
    if (pnd_) {
      PolygonWithDiagonals pnd = recognize_pnd(c.graph(), make_cycle(c.graph(), gamma_));
      const Classification cls = classify_configuration(pnd, p.configuration);
      bool aligned = false;
      for (const auto& st : cls.chains) aligned = aligned || st.aligned;
      p.kind = aligned ? "aligned" : cls.critical ? "circular" : "";
    }
    return p;
  }

  /// Signed quantity whose zero marks the inertia change: d(area)/d(diagonal)
  /// over the two triangles flanking an aligned chain when that applies,
  /// otherwise the determinant of the reduced Hessian.
  std::pair<double, std::string> indicator(double t, const VectorXd& x) const {
    const AngleChart c = chart(t);
    if (pnd_) {
      const Configuration conf = c.configuration(x);
      const double diameter = c.graph().total_length();
      std::vector<std::pair<VertexId, VertexId>> diagonals;
      for (const auto& ch : pnd_->chains)
        if (is_aligned(conf, ch.vertices, Tolerances{}.collinear * diameter))
          diagonals.emplace_back(ch.vertices.front(), ch.vertices.back());
      if (diagonals.size() == 1) {
        const auto [lo, hi] = diagonals[0];
        const double w = (conf.at(hi) - conf.at(lo)).norm();
        double slope = 0.0;
        int triangles = 0;
        for (const auto& cell : elementary_cycles(pnd_->gamma, diagonals)) {
          if (cell.vertices.size() != 3) continue;
          VertexId apex;
          for (const auto& v : cell.vertices)
            if (v != lo && v != hi) apex = v;
          const double s = oriented_area(conf, cell.vertices);
          slope += (s > 0 ? 1.0 : -1.0) *
                   area_derivative_wrt_side((conf.at(apex) - conf.at(lo)).norm(), (conf.at(hi) - conf.at(apex)).norm(), w);
          ++triangles;
        }
        if (triangles == 2) return {slope, "triangle slope"};
      }
    }
    const TangentData td = tangent_data(c, objective(c), x);
    return {td.hessian.rows() ? td.hessian.determinant() : 0.0, "determinant"};
  }

  const ContinuationOptions& options() const { return opts_; }

 private:
  LinkageGraph base_;
  std::vector<VertexId> gamma_;
  std::size_t edge_;
  ContinuationOptions opts_;
  std::size_t gauge_;
  std::optional<PolygonWithDiagonals> pnd_;
};

}  // namespace detail

/// Walls crossed by the family: cycles whose signed length sum changes sign over [from, to].
inline std::vector<std::string> walls_crossed(const LinkageGraph& g, std::size_t edge, double from, double to) {
  std::vector<std::string> out;
  for (const auto& cyc : simple_cycles(g)) {
    if (std::find(cyc.begin(), cyc.end(), edge) == cyc.end()) continue;
    const std::size_t k = cyc.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << (k - 1)); ++mask) {
      auto sum = [&](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const double l = cyc[j] == edge ? t : g.edges()[cyc[j]].length;
          s += (j > 0 && ((mask >> (j - 1)) & 1U)) ? -l : l;
        }
        return s;
      };
      if (sum(from) * sum(to) < 0.0) {
        std::string name;
        for (std::size_t j = 0; j < k; ++j) name += (j ? "," : "") + std::to_string(cyc[j]);
        out.push_back("cycle {" + name + "} meets a wall");
        break;
      }
    }
  }
  return out;
}

inline BranchDiagram continue_family(const LinkageGraph& g, const std::vector<VertexId>& gamma, std::size_t edge,
                                     double from, double to, int steps, const ContinuationOptions& opts = {}) {
  if (edge >= g.edge_count()) detail::fail(ErrorKind::InvalidInput, "no edge " + std::to_string(edge));
  if (!(from > 0.0) || !(to > 0.0) || steps < 0) detail::fail(ErrorKind::InvalidInput, "bad parameter range");
  if (from == to) steps = 0;
  if (steps == 0 && from != to) detail::fail(ErrorKind::InvalidInput, "a non-trivial range needs at least one step");

  const detail::Family fam(g, gamma, edge, opts);
  BranchDiagram out;
  out.edge = edge;
  out.edge_label = g.edges()[edge].u + "-" + g.edges()[edge].v;
  out.warnings = walls_crossed(g, edge, from, to);

  std::vector<double> ts;
  for (int k = 0; k <= steps; ++k) ts.push_back(steps ? from + (to - from) * k / steps : from);

  // per branch: last two accepted (t, x)
  struct Live {
    std::size_t id;
    std::optional<std::pair<double, VectorXd>> prev;
    double t;
    VectorXd x;
  };
  std::vector<Live> live;

  {
    const AngleChart c = fam.chart(ts[0]);
    DiagramColumn col{ts[0], {}};
    for (const auto& nc : find_critical_numeric(c, fam.objective(c), opts.oracle)) {
      const std::size_t id = out.branches.size();
      out.branches.push_back({id, ts[0], ts[0], std::nullopt, "alive"});
      live.push_back({id, std::nullopt, ts[0], nc.x});
      col.points.push_back(fam.describe(ts[0], nc.x, id));
    }
    out.columns.push_back(std::move(col));
  }

  std::mt19937_64 rng(opts.oracle.seed + 1);
  for (int k = 1; k <= steps; ++k) {
    const double t0 = ts[k - 1], t1 = ts[k];
    const double cluster = opts.oracle.cluster_tol * fam.total(t1);
    const AngleChart c1 = fam.chart(t1);
    const TrigObjective obj1 = fam.objective(c1);
    const DiagramColumn& before = out.columns.back();
    auto point_before = [&](std::size_t id) -> const BranchPoint* {
      for (const auto& p : before.points)
        if (p.branch == id) return &p;
      return nullptr;
    };

    // 1. follow every live branch
    std::vector<Live> next;
    std::vector<std::pair<std::size_t, VectorXd>> ended;  // branch, last point (chart at t1 after re-correction is unavailable)
    std::vector<std::optional<VectorXd>> tracked;
    for (auto& b : live) {
      double reached = t0;
      tracked.push_back(fam.track(b.t, b.x, b.prev, t1, &reached));
      if (!tracked.back()) {
        out.branches[b.id].fate = "lost";
        out.branches[b.id].last = reached;
        out.warnings.push_back("branch " + std::to_string(b.id) + " lost near parameter " + std::to_string(reached));
        ended.emplace_back(b.id, b.x);
      }
    }
    // branches landing on one point: the one that started nearest keeps it, the rest merged
    std::vector<bool> taken(live.size(), false);
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (!tracked[i] || taken[i]) continue;
      std::vector<std::size_t> group{i};
      for (std::size_t j = i + 1; j < live.size(); ++j)
        if (tracked[j] && !taken[j] && chart_distance(c1, *tracked[i], *tracked[j]) <= cluster) group.push_back(j);
      std::size_t keep = i;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j : group) {
        taken[j] = true;
        const double d = chart_distance(c1, live[j].x, *tracked[j]);
        if (d < best) {
          best = d;
          keep = j;
        }
      }
      for (std::size_t j : group) {
        if (j == keep) continue;
        out.branches[live[j].id].fate = "merged";
        out.branches[live[j].id].last = t1;
        ended.emplace_back(live[j].id, live[j].x);
      }
      next.push_back({live[keep].id, std::make_pair(live[keep].t, live[keep].x), t1, *tracked[keep]});
    }
    std::sort(next.begin(), next.end(), [](const Live& a, const Live& b) { return a.id < b.id; });

    DiagramColumn col{t1, {}};
    for (const auto& b : next) {
      col.points.push_back(fam.describe(t1, b.x, b.id));
      out.branches[b.id].last = t1;
    }

    // 2. which surviving branches changed inertia in this interval
    std::vector<std::size_t> changed;
    for (const auto& p : col.points)
      if (const BranchPoint* q = point_before(p.branch); q && !(q->inertia == p.inertia)) changed.push_back(p.branch);

    // 3. rescan for branches that appeared
    std::vector<VectorXd> candidates;
    {
      OracleOptions o = opts.oracle;
      o.n_seeds = opts.rescan_seeds;
      o.seed = opts.oracle.seed + static_cast<std::uint64_t>(k);
      for (const auto& nc : find_critical_numeric(c1, obj1, o)) candidates.push_back(nc.x);
      std::normal_distribution<double> noise(0.0, 1.0);
      for (std::size_t id : changed) {
        const VectorXd& centre = std::find_if(next.begin(), next.end(), [&](const Live& l) { return l.id == id; })->x;
        for (std::size_t s = 0; s < opts.local_seeds; ++s) {
          const double scale = std::pow(10.0, -3.0 + 2.5 * static_cast<double>(s % 6) / 5.0);
          VectorXd seed = centre;
          for (Eigen::Index j = 0; j < seed.size(); ++j) seed(j) += scale * noise(rng);
          try {
            if (auto x = newton_critical(c1, obj1, project_to_manifold(c1, seed), opts.oracle)) candidates.push_back(*x);
          } catch (const Error&) {
          }
        }
      }
    }
    std::vector<std::size_t> born;
    for (const auto& x : candidates) {
      bool known = false;
      for (const auto& b : next) known = known || chart_distance(c1, b.x, x) <= cluster;
      if (known) continue;
      const std::size_t id = out.branches.size();
      out.branches.push_back({id, t1, t1, std::nullopt, "alive"});
      next.push_back({id, std::nullopt, t1, x});
      col.points.push_back(fam.describe(t1, x, id));
      born.push_back(id);
    }

    // 4. locate and attribute inertia changes
    auto nearest_changed = [&](const VectorXd& x) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t id : changed) {
        const auto& l = *std::find_if(next.begin(), next.end(), [&](const Live& v) { return v.id == id; });
        const double d = chart_distance(c1, l.x, x);
        if (d < bd) {
          bd = d;
          best = id;
        }
      }
      return best;
    };
    for (std::size_t id : born) {
      if (auto p = nearest_changed(std::find_if(next.begin(), next.end(), [&](const Live& v) { return v.id == id; })->x))
        out.branches[id].parent = *p;
    }
    std::vector<std::pair<std::size_t, std::size_t>> absorbed;  // (changed branch, ended branch)
    for (const auto& [id, x] : ended) {
      // ended branches are compared at t0 against the changed branch's previous point
      std::optional<std::size_t> best;
      double bd = std::numeric_limits<double>::infinity();
      const AngleChart c0 = fam.chart(t0);
      for (std::size_t cid : changed)
        if (const BranchPoint* q = point_before(cid)) {
          const double d = chart_distance(c0, q->x, x);
          if (d < bd) {
            bd = d;
            best = cid;
          }
        }
      if (best) absorbed.emplace_back(*best, id);
    }

    for (std::size_t id : changed) {
      const BranchPoint* q = point_before(id);
      const auto& l = *std::find_if(next.begin(), next.end(), [&](const Live& v) { return v.id == id; });
      BranchEvent ev;
      ev.branch = id;
      ev.negative_before = q->inertia.negative;
      ev.negative_after = std::find_if(col.points.begin(), col.points.end(), [&](const BranchPoint& p) { return p.branch == id; })->inertia.negative;
      // bisection on the indicator, re-correcting the branch at every midpoint
      double lo = t0, hi = t1;
      VectorXd xlo = q->x, xhi = l.x;
      const auto [flo0, mlo] = fam.indicator(lo, xlo);
      const auto [fhi0, mhi] = fam.indicator(hi, xhi);
      const bool slope = mlo == mhi && mlo != "determinant";
      ev.method = slope ? mlo : "determinant";
      auto signal = [&](double t, const VectorXd& x) {
        if (slope) return fam.indicator(t, x).first;
        const AngleChart c = fam.chart(t);
        return tangent_data(c, fam.objective(c), x).hessian.determinant();
      };
      const double flo = slope ? flo0 : signal(lo, xlo), fhi = slope ? fhi0 : signal(hi, xhi);
      if (flo == 0.0) {
        hi = lo;
      } else if (fhi == 0.0) {
        lo = hi;
      } else if ((flo > 0) == (fhi > 0)) {
        ev.method += " (no sign change; midpoint)";
      } else {
        while (std::abs(hi - lo) > opts.bisection_tol * std::max(1.0, std::abs(lo))) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          auto xm = fam.correct(mid, xlo + (xhi - xlo) * ((mid - lo) / (hi - lo)));
          if (!xm) {
            ev.method += " (corrector failed during bisection)";
            break;
          }
          const double fm = signal(mid, *xm);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm > 0) == (flo > 0)) {
            lo = mid;
            xlo = *xm;
          } else {
            hi = mid;
            xhi = *xm;
          }
        }
      }
      ev.parameter = 0.5 * (lo + hi);
      out.events.push_back(ev);

      std::vector<std::size_t> children;
      for (std::size_t b : born)
        if (out.branches[b].parent == id) children.push_back(b);
      std::vector<std::size_t> gone;
      for (const auto& [cid, e] : absorbed)
        if (cid == id) gone.push_back(e);
      if (children.size() == 2) {
        BranchEvent split = ev;
        split.type = EventType::PitchforkSplit;
        split.children = children;
        out.events.push_back(split);
      }
      if (gone.size() == 2) {
        BranchEvent merge = ev;
        merge.type = EventType::PitchforkMerge;
        merge.children = gone;
        out.events.push_back(merge);
      }
    }
    for (std::size_t id : born)
      if (!out.branches[id].parent) out.warnings.push_back("branch " + std::to_string(id) + " first seen at parameter " + std::to_string(t1));

    out.columns.push_back(std::move(col));
    live = std::move(next);
  }
  std::stable_sort(out.events.begin(), out.events.end(), [](const BranchEvent& a, const BranchEvent& b) { return a.parameter < b.parameter; });
  return out;
}

/// Diagonal length at which I, A1, T, B1 of a [2,2;r] three-chain become concyclic
/// with the two triangles on opposite sides of I-T.
inline double concyclic_diagonal_222(double a1, double a2, double b1, double b2) {
  const double a = a1 * a2, b = b1 * b2;
  return std::sqrt((a * (b1 * b1 + b2 * b2) + b * (a1 * a1 + a2 * a2)) / (a + b));
}

}  // namespace linkarea
