#pragma once

// Cyclic polygons: the solver for prescribed edge orientations and winding
// number, full enumeration of the cyclic configurations of a polygonal
// linkage, and extraction of circle data from a realized polygon.
//
// Notation: a polygon p_1..p_n inscribed in a circle with center O and radius
// R. Edge i subtends the half-angle alpha_i in (0, pi/2] at O, so that
// l_i = 2 R sin(alpha_i); eps_i = +1 when O lies to the left of p_i -> p_{i+1}
// and the signed central angle of edge i is 2 eps_i alpha_i. Closing the
// polygon means sum eps_i alpha_i = pi * omega, omega the winding number.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "linkarea/errors.hpp"
#include "linkarea/geometry.hpp"

namespace linkarea {

struct CyclicPolygon {
  std::vector<double> lengths;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  std::vector<Vec2> vertices;
  std::vector<int> eps;
  std::vector<double> alphas;
  int winding = 0;
  int positive = 0;  // number of edges with eps = +1

  std::size_t size() const noexcept { return lengths.size(); }
  double area() const { return polygon_area(vertices); }

  /// sum eps_i tan(alpha_i); its sign selects the branch of the index formula.
  double tan_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) s += eps[i] * std::tan(alphas[i]);
    return s;
  }

  /// Largest edge-length mismatch, closing edge included: a polygon walked
  /// around by central angles that fails to close shows up on its last edge.
  double closure_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      worst = std::max(worst, std::abs((vertices[(i + 1) % vertices.size()] - vertices[i]).norm() - lengths[i]));
    return worst;
  }

  std::uint64_t eps_mask() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (eps[i] > 0) m |= std::uint64_t{1} << i;
    return m;
  }

  /// Reflection in the x-axis: eps and omega change sign.
  CyclicPolygon mirrored() const {
    CyclicPolygon m = *this;
    m.center.y() = -m.center.y();
    for (Vec2& p : m.vertices) p.y() = -p.y();
    for (int& e : m.eps) e = -e;
    m.winding = -winding;
    m.positive = static_cast<int>(eps.size()) - positive;
    return m;
  }
};

struct CyclicOptions {
  std::size_t grid = 10000;     // samples of alpha_max over (0, pi/2]
  double length_tol = 1e-9;     // relative to the perimeter
  double duplicate_tol = 1e-9;  // relative radius gap under which two roots are one
};

namespace detail {

/// h(phi) = sum eps_i asin(ratio_i sin phi), where phi is the half-angle of
/// the longest edge and ratio_i = l_i / l_max.
struct HalfAngleSum {
  std::vector<double> ratio;
  std::vector<int> eps;

  double alpha(std::size_t i, double phi) const {
    if (ratio[i] >= 1.0) return phi;
    return std::asin(ratio[i] * std::sin(phi));
  }
  double operator()(double phi) const {
    double h = 0.0;
    for (std::size_t i = 0; i < ratio.size(); ++i) h += eps[i] * alpha(i, phi);
    return h;
  }
  double signed_ratio_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < ratio.size(); ++i) s += eps[i] * ratio[i];
    return s;
  }
};

/// Roots in phi of h(phi) = pi * omega. For omega = 0 the factor sin(phi) is
/// divided out, which keeps roots at large radius visible.
inline std::vector<double> half_angle_roots(const HalfAngleSum& h, const std::vector<double>& grid_values,
                                            const std::vector<double>& phis, int omega) {
  const double target = std::numbers::pi * omega;
  auto value = [&](double phi, double hval) {
    if (omega != 0) return hval - target;
    return phi == 0.0 ? h.signed_ratio_sum() : hval / std::sin(phi);
  };
  auto eval = [&](double phi) { return value(phi, h(phi)); };

  std::vector<double> roots;
  double prev_phi = phis[0];
  double prev = value(phis[0], grid_values[0]);
  for (std::size_t k = 1; k < phis.size(); ++k) {
    const double phi = phis[k];
    const double cur = value(phi, grid_values[k]);
    if (cur == 0.0) {
      roots.push_back(phi);
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = prev_phi, hi = phi, flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = eval(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_phi = phi;
    prev = cur;
  }
  // boundary root R = l_max / 2 (alpha_max = pi/2) that the scan cannot bracket
  if (std::abs(eval(phis.back())) < 1e-13 && (roots.empty() || roots.back() != phis.back()))
    roots.push_back(phis.back());
  return roots;
}

inline void validate_lengths(const std::vector<double>& lengths, double rel_tol) {
  if (lengths.size() < 3) detail::fail(ErrorKind::InvalidInput, "a polygon needs at least 3 edges");
  double sum = 0.0, longest = 0.0;
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) detail::fail(ErrorKind::InvalidInput, "edge lengths must be positive");
    sum += l;
    longest = std::max(longest, l);
  }
  if (longest > sum - longest + rel_tol * sum)
    detail::fail(ErrorKind::InvalidInput, "longest edge exceeds the sum of the others; polygon cannot close");
}

inline CyclicPolygon build_cyclic(const std::vector<double>& lengths, const HalfAngleSum& h, double phi,
                                  int omega) {
  const double lmax = *std::max_element(lengths.begin(), lengths.end());
  CyclicPolygon p;
  p.lengths = lengths;
  p.radius = lmax / (2.0 * std::sin(phi));
  p.eps = h.eps;
  p.winding = omega;
  p.vertices.reserve(lengths.size());
  Vec2 cur(p.radius, 0.0);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    p.vertices.push_back(cur);
    const double a = h.alpha(i, phi);
    p.alphas.push_back(a);
    if (h.eps[i] > 0) ++p.positive;
    cur = rotated(cur, 2.0 * h.eps[i] * a);
  }
  return p;
}

inline std::vector<double> phi_grid(std::size_t n) {
  std::vector<double> phis(n + 1);
  for (std::size_t k = 0; k <= n; ++k) phis[k] = 0.5 * std::numbers::pi * static_cast<double>(k) / n;
  return phis;
}

}  // namespace detail

/// Every cyclic realization with the given edge orientations and winding number,
/// sorted by radius. Empty when none exists.
inline std::vector<CyclicPolygon> solve_cyclic_all(const std::vector<double>& lengths, const std::vector<int>& eps,
                                                   int omega, const CyclicOptions& opts = {}) {
  detail::validate_lengths(lengths, opts.length_tol);
  if (eps.size() != lengths.size()) detail::fail(ErrorKind::InvalidInput, "sign vector size mismatch");
  for (int e : eps)
    if (e != 1 && e != -1) detail::fail(ErrorKind::InvalidInput, "signs must be +1 or -1");
  const double lmax = *std::max_element(lengths.begin(), lengths.end());
  const double perimeter = std::accumulate(lengths.begin(), lengths.end(), 0.0);

  detail::HalfAngleSum h;
  h.eps = eps;
  for (double l : lengths) h.ratio.push_back(l / lmax);
  const auto phis = detail::phi_grid(opts.grid);
  std::vector<double> values(phis.size());
  for (std::size_t k = 0; k < phis.size(); ++k) values[k] = h(phis[k]);

  std::vector<CyclicPolygon> out;
  for (double phi : detail::half_angle_roots(h, values, phis, omega)) {
    CyclicPolygon p = detail::build_cyclic(lengths, h, phi, omega);
    if (p.closure_residual() <= 1e-9 * perimeter) out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.radius < b.radius; });
  return out;
}

/// Smallest-radius solution; NoSolution when the sign pattern cannot close.
inline CyclicPolygon solve_cyclic(const std::vector<double>& lengths, const std::vector<int>& eps, int omega,
                                  const CyclicOptions& opts = {}) {
  auto all = solve_cyclic_all(lengths, eps, omega, opts);
  if (all.empty()) detail::fail(ErrorKind::NoSolution, "no cyclic polygon for this sign pattern and winding");
  return all.front();
}

/// All cyclic configurations of a polygonal linkage, up to orientation-preserving
/// isometries. Mirror images are distinct and both reported. Sorted by
/// (eps bitmask, omega, radius).
inline std::vector<CyclicPolygon> enumerate_cyclic(const std::vector<double>& lengths, const CyclicOptions& opts = {},
                                                   std::vector<std::string>* warnings = nullptr) {
  detail::validate_lengths(lengths, opts.length_tol);
  const std::size_t n = lengths.size();
  if (n > 30) detail::fail(ErrorKind::InvalidInput, "enumeration is limited to 30 edges");
  const double lmax = *std::max_element(lengths.begin(), lengths.end());
  const double perimeter = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  const auto phis = detail::phi_grid(opts.grid);

  // alpha_i(phi) does not depend on eps: tabulate once
  std::vector<std::vector<double>> alpha_table(n, std::vector<double>(phis.size()));
  detail::HalfAngleSum h;
  for (double l : lengths) h.ratio.push_back(l / lmax);
  h.eps.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < phis.size(); ++k) alpha_table[i][k] = h.alpha(i, phis[k]);

  std::vector<CyclicPolygon> out;
  std::vector<double> values(phis.size());
  const int max_winding = static_cast<int>(n / 2);
  // eps_0 = +1 here; the mirror image covers eps_0 = -1
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    h.eps[0] = 1;
    double pos_bound = 0.5 * std::numbers::pi, neg_bound = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      h.eps[i] = ((mask >> (i - 1)) & 1U) ? -1 : 1;
      (h.eps[i] > 0 ? pos_bound : neg_bound) += 0.5 * std::numbers::pi;
    }
    for (std::size_t k = 0; k < phis.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += h.eps[i] * alpha_table[i][k];
      values[k] = s;
    }
    for (int omega = -max_winding; omega <= max_winding; ++omega) {
      if (std::numbers::pi * omega > pos_bound || -std::numbers::pi * omega > neg_bound) continue;
      std::vector<CyclicPolygon> found;
      for (double phi : detail::half_angle_roots(h, values, phis, omega)) {
        CyclicPolygon p = detail::build_cyclic(lengths, h, phi, omega);
        if (p.closure_residual() > 1e-9 * perimeter) continue;
        if (!found.empty() && std::abs(found.back().radius - p.radius) <= opts.duplicate_tol * found.back().radius) {
          if (warnings) warnings->push_back("NonGeneric: coinciding cyclic solutions (double root)");
          continue;
        }
        found.push_back(std::move(p));
      }
      for (auto& p : found) {
        out.push_back(p.mirrored());
        out.push_back(std::move(p));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CyclicPolygon& a, const CyclicPolygon& b) {
    if (a.eps_mask() != b.eps_mask()) return a.eps_mask() < b.eps_mask();
    if (a.winding != b.winding) return a.winding < b.winding;
    return a.radius < b.radius;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Circle data of a realized polygon

class NotConcyclicError : public Error {
 public:
  NotConcyclicError(double deviation, double radius)
      : Error(ErrorKind::NotConcyclic, "vertices deviate from the circle by " + std::to_string(deviation)),
        deviation_(deviation),
        radius_(radius) {}
  double deviation() const noexcept { return deviation_; }
  double radius() const noexcept { return radius_; }

 private:
  double deviation_;
  double radius_;
};

/// Circumcenter of three points; nullopt when they are (numerically) collinear.
inline std::optional<Vec2> circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double scale = ab.squaredNorm() + ac.squaredNorm();
  if (std::abs(d) <= 1e-14 * scale) return std::nullopt;
  const double ux = (ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d;
  const double uy = (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d;
  return a + Vec2(ux, uy);
}

/// Fits the circle through the best-conditioned vertex triple and extracts
/// center, radius, eps, alpha, omega. `tol` is relative to the radius.
inline CyclicPolygon circle_data(const std::vector<Vec2>& pts, double tol = 1e-8) {
  const std::size_t n = pts.size();
  if (n < 3) detail::fail(ErrorKind::InvalidInput, "circle_data needs at least 3 vertices");
  double best = -1.0;
  std::size_t bi = 0, bj = 1, bk = 2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double a = std::abs(cross(pts[j] - pts[i], pts[k] - pts[i]));
        if (a > best) {
          best = a;
          bi = i, bj = j, bk = k;
        }
      }
  auto center = circumcenter(pts[bi], pts[bj], pts[bk]);
  if (!center) throw NotConcyclicError(std::numeric_limits<double>::infinity(), 0.0);
  CyclicPolygon p;
  p.center = *center;
  p.radius = (pts[bi] - p.center).norm();
  p.vertices = pts;
  double deviation = 0.0;
  for (const Vec2& q : pts) deviation = std::max(deviation, std::abs((q - p.center).norm() - p.radius));
  if (deviation > tol * p.radius) throw NotConcyclicError(deviation, p.radius);

  double signed_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    const double len = (b - a).norm();
    p.lengths.push_back(len);
    const double side = cross(b - a, p.center - a);
    if (len == 0.0 || std::abs(side) / len <= tol * p.radius)
      detail::fail(ErrorKind::DegenerateCenter, "circle center lies on the line of edge " + std::to_string(i));
    const int e = side > 0.0 ? 1 : -1;
    const Vec2 ra = a - p.center, rb = b - p.center;
    const double alpha = 0.5 * std::atan2(std::abs(cross(ra, rb)), ra.dot(rb));
    p.eps.push_back(e);
    p.alphas.push_back(alpha);
    if (e > 0) ++p.positive;
    signed_sum += e * alpha;
  }
  const double w = signed_sum / std::numbers::pi;
  p.winding = static_cast<int>(std::lround(w));
  if (std::abs(w - p.winding) > 1e-6)
    detail::fail(ErrorKind::Degenerate, "winding number is not an integer (" + std::to_string(w) + ")");
  return p;
}

inline CyclicPolygon circle_data(const Configuration& c, const std::vector<VertexId>& cycle, double tol = 1e-8) {
  std::vector<Vec2> pts;
  for (const auto& v : cycle) pts.push_back(c.at(v));
  return circle_data(pts, tol);
}

inline CyclicPolygon circle_data(const Configuration& c, const DistinguishedCycle& cycle, double tol = 1e-8) {
  return circle_data(c, cycle.vertices, tol);
}

}  // namespace linkarea
