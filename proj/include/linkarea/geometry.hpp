#pragma once

// Plane configurations and the elementary geometry used throughout: oriented
// area, alignment, open-chain reach, the side derivative of a triangle's area,
// and the wall (genericity) check over the cycles of a linkage.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "linkarea/errors.hpp"
#include "linkarea/graph.hpp"

namespace linkarea {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Rotation of `v` by `angle` radians, counter-clockwise.
inline Vec2 rotated(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// Tolerances shared by the geometric tests. All overridable from the CLI.
struct Tolerances {
  double length = 1e-9;      // edge-length residual, relative to the total length
  double collinear = 1e-8;   // distance to a line, per unit diameter
  double concyclic = 1e-8;   // distance to a circle, relative to its radius
  double gradient = 1e-10;   // projected gradient, relative to the objective scale
  double eigen_zero = 1e-7;  // zero band for Hessian eigenvalues, relative to the Hessian norm
};

struct Configuration {
  std::map<VertexId, Vec2> coords;

  const Vec2& at(const VertexId& v) const {
    auto it = coords.find(v);
    if (it == coords.end()) detail::fail(ErrorKind::InvalidInput, "configuration has no vertex '" + v + "'");
    return it->second;
  }
  Vec2& operator[](const VertexId& v) { return coords[v]; }
};

/// Largest | |p_u - p_v| - l | over the edges of g.
inline double max_length_residual(const LinkageGraph& g, const Configuration& c) {
  double worst = 0.0;
  for (const Edge& e : g.edges()) worst = std::max(worst, std::abs((c.at(e.u) - c.at(e.v)).norm() - e.length));
  return worst;
}

inline bool realizes(const LinkageGraph& g, const Configuration& c, double rel_tol = 1e-9) {
  return max_length_residual(g, c) <= rel_tol * g.total_length();
}

/// Shoelace area of a closed vertex sequence.
inline double polygon_area(const std::vector<Vec2>& pts) {
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) twice += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * twice;
}

inline double oriented_area(const Configuration& c, const std::vector<VertexId>& cycle) {
  std::vector<Vec2> pts;
  pts.reserve(cycle.size());
  for (const auto& v : cycle) pts.push_back(c.at(v));
  return polygon_area(pts);
}

inline double oriented_area(const Configuration& c, const DistinguishedCycle& cycle) {
  return oriented_area(c, cycle.vertices);
}

/// Largest distance of the points from their least-squares line.
inline double line_deviation(const std::vector<Vec2>& pts) {
  if (pts.size() <= 2) return 0.0;
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Vec2 dir = eig.eigenvectors().col(1);
  double worst = 0.0;
  for (const Vec2& p : pts) worst = std::max(worst, std::abs(cross(dir, p - mean)));
  return worst;
}

inline bool is_aligned(const Configuration& c, const std::vector<VertexId>& path, double tol) {
  std::vector<Vec2> pts;
  for (const auto& v : path) pts.push_back(c.at(v));
  return line_deviation(pts) <= tol;
}

/// Attainable distances between the endpoints of an open chain.
struct ReachInterval {
  double dmin = 0.0;
  double dmax = 0.0;

  bool strictly_contains(double d, double margin = 0.0) const { return d > dmin + margin && d < dmax - margin; }
};

inline ReachInterval chain_reach(const std::vector<double>& lengths) {
  if (lengths.empty()) detail::fail(ErrorKind::InvalidInput, "chain_reach needs at least one length");
  double sum = 0.0, longest = 0.0;
  for (double l : lengths) {
    sum += l;
    longest = std::max(longest, l);
  }
  return {std::max(0.0, 2.0 * longest - sum), sum};
}

/// d(area)/dc for a triangle with fixed sides a, b: +|OM| for an acute angle
/// opposite c, -|OM| for an obtuse one (O circumcenter, M midpoint of c).
inline double area_derivative_wrt_side(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0) || !(a + b > c && b + c > a && a + c > b))
    detail::fail(ErrorKind::DegenerateTriangle, "sides violate the strict triangle inequality");
  const double s = 0.5 * (a + b + c);
  const double area = std::sqrt(s * (s - a) * (s - b) * (s - c));
  const double sin_gamma = 2.0 * area / (a * b);
  const double cos_gamma = (a * a + b * b - c * c) / (2.0 * a * b);
  return 0.5 * c * cos_gamma / sin_gamma;
}

// ---------------------------------------------------------------------------
// Walls

struct WallHit {
  std::vector<std::size_t> cycle_edges;
  std::vector<int> signs;
  double value = 0.0;
};

struct WallReport {
  std::vector<WallHit> hits;
  double min_margin = 0.0;  // smallest |sum of signed lengths| over all cycles and signs
  std::size_t cycles_checked = 0;

  bool clean() const noexcept { return hits.empty(); }
};

/// Edge sets of all simple cycles, including 2-cycles made of parallel edges.
inline std::vector<std::vector<std::size_t>> simple_cycles(const LinkageGraph& g) {
  std::set<std::vector<std::size_t>> found;
  const std::size_t n = g.vertex_count();
  std::vector<char> on_path(n, 0);
  std::vector<std::size_t> path_edges;
  for (std::size_t s = 0; s < n; ++s) {
    auto dfs = [&](auto&& self, std::size_t x) -> void {
      for (std::size_t e : g.incident(x)) {
        if (!path_edges.empty() && e == path_edges.back()) continue;
        const std::size_t y = g.other_end(e, x);
        if (y == s && !path_edges.empty()) {
          std::vector<std::size_t> cyc = path_edges;
          cyc.push_back(e);
          std::sort(cyc.begin(), cyc.end());
          found.insert(std::move(cyc));
        } else if (y > s && !on_path[y]) {
          on_path[y] = 1;
          path_edges.push_back(e);
          self(self, y);
          path_edges.pop_back();
          on_path[y] = 0;
        }
      }
    };
    on_path[s] = 1;
    dfs(dfs, s);
    on_path[s] = 0;
  }
  return {found.begin(), found.end()};
}

inline WallReport wall_check(const LinkageGraph& g, double tol) {
  WallReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& cyc : simple_cycles(g)) {
    ++report.cycles_checked;
    const std::size_t k = cyc.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_mask = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (k - 1)); ++mask) {
      double sum = g.edges()[cyc[0]].length;
      for (std::size_t j = 1; j < k; ++j) {
        const double l = g.edges()[cyc[j]].length;
        sum += ((mask >> (j - 1)) & 1U) ? -l : l;
      }
      if (std::abs(sum) < best) {
        best = std::abs(sum);
        best_mask = mask;
      }
    }
    report.min_margin = std::min(report.min_margin, best);
    if (best < tol) {
      WallHit hit{cyc, {1}, best};
      for (std::size_t j = 1; j < k; ++j) hit.signs.push_back(((best_mask >> (j - 1)) & 1U) ? -1 : 1);
      report.hits.push_back(std::move(hit));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rigid alignment of labelled point sets

/// Largest distance between corresponding vertices after the best proper
/// rigid motion (rotation + translation) of `b` onto `a`.
inline double aligned_distance(const Configuration& a, const Configuration& b, const std::vector<VertexId>& vertices) {
  if (vertices.empty()) return 0.0;
  Vec2 ca = Vec2::Zero(), cb = Vec2::Zero();
  for (const auto& v : vertices) {
    ca += a.at(v);
    cb += b.at(v);
  }
  ca /= static_cast<double>(vertices.size());
  cb /= static_cast<double>(vertices.size());
  double dot = 0.0, crs = 0.0;
  for (const auto& v : vertices) {
    const Vec2 pa = a.at(v) - ca;
    const Vec2 pb = b.at(v) - cb;
    dot += pb.dot(pa);
    crs += cross(pb, pa);
  }
  const double angle = std::atan2(crs, dot);
  double worst = 0.0;
  for (const auto& v : vertices) worst = std::max(worst, (rotated(b.at(v) - cb, angle) - (a.at(v) - ca)).norm());
  return worst;
}

}  // namespace linkarea
