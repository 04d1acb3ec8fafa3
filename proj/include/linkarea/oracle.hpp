#pragma once

// Numerical verification engine. Configurations are parametrized by one angle
// per edge with a gauge edge fixed at angle 0 and the root vertex at the
// origin; every non-tree edge contributes its two closure equations. All
// objectives are trigonometric quadratic forms in the edge directions,
//   F = sum_{e,f} K_ef sin(t_f - t_e) + C_ef cos(t_f - t_e),
// which covers the oriented area (K) and weighted squared distances (C).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "linkarea/errors.hpp"
#include "linkarea/geometry.hpp"
#include "linkarea/graph.hpp"

namespace linkarea {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class AngleChart {
 public:
  AngleChart() = default;

  /// `gauge` defaults to the lexicographically smallest edge (by sorted endpoint ids, then index).
  explicit AngleChart(LinkageGraph g, std::optional<std::size_t> gauge = std::nullopt) : g_(std::move(g)) {
    const std::size_t ne = g_.edge_count(), nv = g_.vertex_count();
    if (gauge) {
      if (*gauge >= ne) detail::fail(ErrorKind::InvalidInput, "gauge edge out of range");
      gauge_ = *gauge;
    } else {
      auto key = [&](std::size_t e) {
        const Edge& ed = g_.edges()[e];
        return std::make_tuple(std::min(ed.u, ed.v), std::max(ed.u, ed.v), e);
      };
      gauge_ = 0;
      for (std::size_t e = 1; e < ne; ++e)
        if (key(e) < key(gauge_)) gauge_ = e;
    }
    for (std::size_t e = 0; e < ne; ++e)
      if (e != gauge_) free_.push_back(e);

    // BFS spanning tree; paths_ row v holds the signed edges from the root to v
    paths_ = MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(ne));
    std::vector<char> seen(nv, 0), tree(ne, 0);
    std::vector<std::size_t> queue{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t x = queue[head];
      std::vector<std::size_t> inc = g_.incident(x);
      std::sort(inc.begin(), inc.end());
      for (std::size_t e : inc) {
        const std::size_t y = g_.other_end(e, x);
        if (seen[y]) continue;
        seen[y] = 1;
        tree[e] = 1;
        paths_.row(static_cast<Eigen::Index>(y)) = paths_.row(static_cast<Eigen::Index>(x));
        paths_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(e)) += g_.target(e) == y ? 1.0 : -1.0;
        queue.push_back(y);
      }
    }
    for (std::size_t e = 0; e < ne; ++e) {
      if (tree[e]) continue;
      // p_target - p_source - edge vector = 0
      VectorXd row = paths_.row(static_cast<Eigen::Index>(g_.target(e))) -
                     paths_.row(static_cast<Eigen::Index>(g_.source(e)));
      row(static_cast<Eigen::Index>(e)) -= 1.0;
      cycles_.push_back(row);
    }
  }

  const LinkageGraph& graph() const noexcept { return g_; }
  std::size_t gauge() const noexcept { return gauge_; }
  std::size_t variable_count() const noexcept { return free_.size(); }
  std::size_t constraint_count() const noexcept { return 2 * cycles_.size(); }
  int dimension() const noexcept {
    return static_cast<int>(variable_count()) - static_cast<int>(constraint_count());
  }
  const std::vector<std::size_t>& free_edges() const noexcept { return free_; }
  /// Signed tree-path coefficients of each vertex position (rows) in the edge vectors (columns).
  const MatrixXd& paths() const noexcept { return paths_; }

  VectorXd full(const VectorXd& x) const {
    VectorXd t = VectorXd::Zero(static_cast<Eigen::Index>(g_.edge_count()));
    for (std::size_t k = 0; k < free_.size(); ++k) t(static_cast<Eigen::Index>(free_[k])) = x(static_cast<Eigen::Index>(k));
    return t;
  }
  VectorXd reduce(const VectorXd& full_gradient) const {
    VectorXd r(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) r(static_cast<Eigen::Index>(k)) = full_gradient(static_cast<Eigen::Index>(free_[k]));
    return r;
  }
  MatrixXd reduce(const MatrixXd& full_hessian) const {
    const auto n = static_cast<Eigen::Index>(free_.size());
    MatrixXd r(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        r(a, b) = full_hessian(static_cast<Eigen::Index>(free_[static_cast<std::size_t>(a)]),
                               static_cast<Eigen::Index>(free_[static_cast<std::size_t>(b)]));
    return r;
  }

  double length(std::size_t e) const { return g_.edges()[e].length; }

  VectorXd residual(const VectorXd& x) const {
    const VectorXd t = full(x);
    VectorXd r(static_cast<Eigen::Index>(constraint_count()));
    for (std::size_t c = 0; c < cycles_.size(); ++c) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t e = 0; e < g_.edge_count(); ++e) {
        const double b = cycles_[c](static_cast<Eigen::Index>(e));
        if (b == 0.0) continue;
        sx += b * length(e) * std::cos(t(static_cast<Eigen::Index>(e)));
        sy += b * length(e) * std::sin(t(static_cast<Eigen::Index>(e)));
      }
      r(static_cast<Eigen::Index>(2 * c)) = sx;
      r(static_cast<Eigen::Index>(2 * c + 1)) = sy;
    }
    return r;
  }

  MatrixXd jacobian(const VectorXd& x) const {
    const VectorXd t = full(x);
    MatrixXd j = MatrixXd::Zero(static_cast<Eigen::Index>(constraint_count()), static_cast<Eigen::Index>(free_.size()));
    for (std::size_t c = 0; c < cycles_.size(); ++c)
      for (std::size_t k = 0; k < free_.size(); ++k) {
        const std::size_t e = free_[k];
        const double b = cycles_[c](static_cast<Eigen::Index>(e)) * length(e);
        j(static_cast<Eigen::Index>(2 * c), static_cast<Eigen::Index>(k)) = -b * std::sin(t(static_cast<Eigen::Index>(e)));
        j(static_cast<Eigen::Index>(2 * c + 1), static_cast<Eigen::Index>(k)) = b * std::cos(t(static_cast<Eigen::Index>(e)));
      }
    return j;
  }

  /// sum_j lambda_j * Hess g_j; each Hess g_j is diagonal.
  MatrixXd weighted_constraint_hessian(const VectorXd& x, const VectorXd& lambda) const {
    const VectorXd t = full(x);
    VectorXd diag = VectorXd::Zero(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t c = 0; c < cycles_.size(); ++c)
      for (std::size_t k = 0; k < free_.size(); ++k) {
        const std::size_t e = free_[k];
        const double b = cycles_[c](static_cast<Eigen::Index>(e)) * length(e);
        const double te = t(static_cast<Eigen::Index>(e));
        diag(static_cast<Eigen::Index>(k)) += lambda(static_cast<Eigen::Index>(2 * c)) * (-b * std::cos(te)) +
                                              lambda(static_cast<Eigen::Index>(2 * c + 1)) * (-b * std::sin(te));
      }
    return diag.asDiagonal();
  }

  Configuration configuration(const VectorXd& x) const {
    const VectorXd t = full(x);
    Configuration c;
    for (std::size_t v = 0; v < g_.vertex_count(); ++v) {
      Vec2 p = Vec2::Zero();
      for (std::size_t e = 0; e < g_.edge_count(); ++e) {
        const double a = paths_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(e));
        if (a != 0.0) p += a * length(e) * Vec2(std::cos(t(static_cast<Eigen::Index>(e))), std::sin(t(static_cast<Eigen::Index>(e))));
      }
      c[g_.vertices()[v]] = p;
    }
    return c;
  }

  /// Chart coordinates of a realized configuration (rotated so the gauge edge has angle 0).
  VectorXd coordinates(const Configuration& c) const {
    auto angle = [&](std::size_t e) {
      const Vec2 d = c.at(g_.edges()[e].v) - c.at(g_.edges()[e].u);
      return std::atan2(d.y(), d.x());
    };
    const double base = angle(gauge_);
    VectorXd x(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) x(static_cast<Eigen::Index>(k)) = std::remainder(angle(free_[k]) - base, 2 * std::numbers::pi);
    return x;
  }

 private:
  LinkageGraph g_;
  std::size_t gauge_ = 0;
  std::vector<std::size_t> free_;
  MatrixXd paths_;
  std::vector<VectorXd> cycles_;
};

// ---------------------------------------------------------------------------
// Objectives

class TrigObjective {
 public:
  TrigObjective() = default;
  TrigObjective(MatrixXd k, MatrixXd c) : k_(std::move(k)), c_(std::move(c)) {}

  const MatrixXd& sine_part() const noexcept { return k_; }
  const MatrixXd& cosine_part() const noexcept { return c_; }
  double scale() const { return k_.cwiseAbs().sum() + c_.cwiseAbs().sum(); }

  double value(const VectorXd& t) const {
    double s = 0.0;
    for_each_term(t, [&](Eigen::Index, Eigen::Index, double a, double, double) { s += a; });
    return s;
  }
  VectorXd gradient(const VectorXd& t) const {
    VectorXd gr = VectorXd::Zero(t.size());
    for_each_term(t, [&](Eigen::Index e, Eigen::Index f, double, double da, double) {
      gr(f) += da;
      gr(e) -= da;
    });
    return gr;
  }
  MatrixXd hessian(const VectorXd& t) const {
    MatrixXd h = MatrixXd::Zero(t.size(), t.size());
    for_each_term(t, [&](Eigen::Index e, Eigen::Index f, double, double, double dda) {
      h(f, f) += dda;
      h(e, e) += dda;
      h(e, f) -= dda;
      h(f, e) -= dda;
    });
    return h;
  }

 private:
  template <class Fn>
  void for_each_term(const VectorXd& t, Fn&& fn) const {
    for (Eigen::Index e = 0; e < k_.rows(); ++e)
      for (Eigen::Index f = 0; f < k_.cols(); ++f) {
        const double kk = k_(e, f), cc = c_(e, f);
        if (kk == 0.0 && cc == 0.0) continue;
        const double d = t(f) - t(e), s = std::sin(d), co = std::cos(d);
        const double a = kk * s + cc * co;
        fn(e, f, a, kk * co - cc * s, -a);
      }
  }

  MatrixXd k_, c_;
};

/// Oriented area of the closed vertex sequence `cycle`.
inline TrigObjective area_objective(const AngleChart& chart, const std::vector<VertexId>& cycle) {
  const LinkageGraph& g = chart.graph();
  const auto ne = static_cast<Eigen::Index>(g.edge_count());
  MatrixXd k = MatrixXd::Zero(ne, ne);
  VectorXd len(ne);
  for (Eigen::Index e = 0; e < ne; ++e) len(e) = chart.length(static_cast<std::size_t>(e));
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const VectorXd a = chart.paths().row(static_cast<Eigen::Index>(g.index_of(cycle[i]))).transpose().cwiseProduct(len);
    const VectorXd b =
        chart.paths().row(static_cast<Eigen::Index>(g.index_of(cycle[(i + 1) % cycle.size()]))).transpose().cwiseProduct(len);
    k += 0.5 * a * b.transpose();  // cross(u_e, u_f) = sin(t_f - t_e)
  }
  return {k, MatrixXd::Zero(ne, ne)};
}

/// sum w |p_u - p_v|^2 over the given vertex pairs.
inline TrigObjective pair_distance_objective(const AngleChart& chart,
                                             const std::vector<std::tuple<VertexId, VertexId, double>>& pairs) {
  const LinkageGraph& g = chart.graph();
  const auto ne = static_cast<Eigen::Index>(g.edge_count());
  MatrixXd c = MatrixXd::Zero(ne, ne);
  VectorXd len(ne);
  for (Eigen::Index e = 0; e < ne; ++e) len(e) = chart.length(static_cast<std::size_t>(e));
  for (const auto& [u, v, w] : pairs) {
    const VectorXd d = (chart.paths().row(static_cast<Eigen::Index>(g.index_of(u))) -
                        chart.paths().row(static_cast<Eigen::Index>(g.index_of(v))))
                           .transpose()
                           .cwiseProduct(len);
    c += w * d * d.transpose();
  }
  return {MatrixXd::Zero(ne, ne), c};
}

/// An objective restricted to the chart's free coordinates, as a plain function of x.
struct ChartFunction {
  const AngleChart* chart;
  const TrigObjective* objective;

  double value(const VectorXd& x) const { return objective->value(chart->full(x)); }
  VectorXd gradient(const VectorXd& x) const { return chart->reduce(objective->gradient(chart->full(x))); }
  MatrixXd hessian(const VectorXd& x) const { return chart->reduce(objective->hessian(chart->full(x))); }
};

// ---------------------------------------------------------------------------
// Projection, critical points, inertia

struct OracleOptions {
  std::size_t n_seeds = 1000;
  std::uint64_t seed = 42;
  double gradient_tol = 1e-10;   // relative to the objective scale
  double cluster_tol = 1e-5;     // relative to the total edge length
  double eigen_zero = 1e-7;      // relative to the Lagrangian Hessian norm
  int max_newton = 100;
};

/// Gauss-Newton on the closure residual with minimum-norm steps.
inline VectorXd project_to_manifold(const AngleChart& chart, VectorXd x, int max_iter = 100) {
  const double tol = 1e-12 * chart.graph().total_length();
  if (chart.constraint_count() == 0) return x;
  VectorXd r = chart.residual(x);
  for (int it = 0; it < max_iter; ++it) {
    const double rn = r.norm();
    if (rn <= tol) return x;
    const MatrixXd j = chart.jacobian(x);
    const VectorXd step = j.completeOrthogonalDecomposition().solve(r);
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, scale *= 0.5) {
      const VectorXd trial = x - scale * step;
      const VectorXd rt = chart.residual(trial);
      if (rt.norm() < rn) {
        x = trial;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (r.norm() <= tol) return x;
  detail::fail(ErrorKind::NoConvergence, "projection did not reach the constraint manifold");
}

struct InertiaTriple {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  std::vector<double> eigenvalues;  // ascending, of the reduced Lagrangian Hessian
  double zero_band = 0.0;           // absolute threshold used
  double gap = 0.0;                 // smallest |eigenvalue| outside the band over the band width

  int dimension() const noexcept { return negative + zero + positive; }
  bool operator==(const InertiaTriple& o) const {
    return negative == o.negative && zero == o.zero && positive == o.positive;
  }
};

/// First- and second-order data of the objective restricted to the constraint manifold at x.
struct TangentData {
  MatrixXd basis;          // columns span the tangent space
  VectorXd gradient;       // basis^T grad F
  MatrixXd hessian;        // basis^T (Hess F - sum lambda Hess g) basis
  VectorXd multipliers;
  double stationarity = 0.0;  // || grad F - J^T lambda ||
  double full_gradient_norm = 0.0;
  double lagrangian_norm = 0.0;
};

inline TangentData tangent_data(const AngleChart& chart, const TrigObjective& obj, const VectorXd& x) {
  const ChartFunction fn{&chart, &obj};
  const VectorXd grad = fn.gradient(x);
  MatrixXd hess = fn.hessian(x);
  TangentData td;
  td.full_gradient_norm = grad.norm();
  const auto n = static_cast<Eigen::Index>(chart.variable_count());
  if (chart.constraint_count() == 0) {
    td.basis = MatrixXd::Identity(n, n);
    td.multipliers = VectorXd();
  } else {
    const MatrixXd j = chart.jacobian(x);
    Eigen::JacobiSVD<MatrixXd> svd(j, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-10 * sv(0)) ++rank;
    td.basis = svd.matrixV().rightCols(n - rank);
    td.multipliers = j.transpose().completeOrthogonalDecomposition().solve(grad);
    hess -= chart.weighted_constraint_hessian(x, td.multipliers);
    td.stationarity = (grad - j.transpose() * td.multipliers).norm();
  }
  if (chart.constraint_count() == 0) td.stationarity = grad.norm();
  td.gradient = td.basis.transpose() * grad;
  td.hessian = td.basis.transpose() * hess * td.basis;
  td.hessian = 0.5 * (td.hessian + td.hessian.transpose()).eval();
  if (hess.size() > 0) td.lagrangian_norm = Eigen::SelfAdjointEigenSolver<MatrixXd>(hess).eigenvalues().cwiseAbs().maxCoeff();
  return td;
}

inline InertiaTriple inertia_of(const TangentData& td, double eigen_zero) {
  InertiaTriple out;
  out.zero_band = eigen_zero * td.lagrangian_norm;
  if (td.hessian.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(td.hessian);
  double smallest_outside = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double v = eig.eigenvalues()(k);
    out.eigenvalues.push_back(v);
    if (std::abs(v) <= out.zero_band) {
      ++out.zero;
    } else {
      smallest_outside = std::min(smallest_outside, std::abs(v));
      (v < 0 ? out.negative : out.positive)++;
    }
  }
  out.gap = out.zero_band > 0 ? smallest_outside / out.zero_band : std::numeric_limits<double>::infinity();
  return out;
}

struct NumericCritical {
  VectorXd x;
  Configuration configuration;
  double value = 0.0;
  double tangent_gradient = 0.0;
  double stationarity = 0.0;
  InertiaTriple inertia;
  std::size_t hits = 1;  // seeds that converged here
};

/// Riemannian Newton iteration for a critical point of obj on the manifold, from a feasible x.
inline std::optional<VectorXd> newton_critical(const AngleChart& chart, const TrigObjective& obj, VectorXd x,
                                               const OracleOptions& opts = {}) {
  const double tol = opts.gradient_tol * obj.scale();
  for (int it = 0; it < opts.max_newton; ++it) {
    const TangentData td = tangent_data(chart, obj, x);
    if (td.gradient.norm() <= tol) return x;
    if (td.basis.cols() == 0) return x;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(td.hessian);
    const VectorXd& ev = eig.eigenvalues();
    const double cut = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    VectorXd coeff = eig.eigenvectors().transpose() * td.gradient;
    for (Eigen::Index k = 0; k < ev.size(); ++k) coeff(k) = std::abs(ev(k)) > cut ? coeff(k) / ev(k) : 0.0;
    VectorXd step = -(eig.eigenvectors() * coeff);
    if (step.norm() > 0.5) step *= 0.5 / step.norm();
    try {
      x = project_to_manifold(chart, x + td.basis * step);
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  const TangentData td = tangent_data(chart, obj, x);
  if (td.gradient.norm() <= tol) return x;
  return std::nullopt;
}

inline NumericCritical describe_critical(const AngleChart& chart, const TrigObjective& obj, const VectorXd& x,
                                         const OracleOptions& opts = {}) {
  const TangentData td = tangent_data(chart, obj, x);
  NumericCritical c;
  c.x = x;
  c.configuration = chart.configuration(x);
  c.value = obj.value(chart.full(x));
  c.tangent_gradient = td.gradient.norm();
  c.stationarity = td.stationarity;
  c.inertia = inertia_of(td, opts.eigen_zero);
  return c;
}

/// Largest vertex distance between two chart points (both are in the same gauge).
inline double chart_distance(const AngleChart& chart, const VectorXd& a, const VectorXd& b) {
  const Configuration ca = chart.configuration(a), cb = chart.configuration(b);
  double worst = 0.0;
  for (const auto& v : chart.graph().vertices()) worst = std::max(worst, (ca.at(v) - cb.at(v)).norm());
  return worst;
}

inline VectorXd random_feasible(const AngleChart& chart, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  VectorXd x(static_cast<Eigen::Index>(chart.variable_count()));
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = angle(rng);
  return project_to_manifold(chart, x);
}

/// Multi-start Newton search; clusters converged points by configuration distance.
inline std::vector<NumericCritical> find_critical_numeric(const AngleChart& chart, const TrigObjective& obj,
                                                          const OracleOptions& opts = {}) {
  std::mt19937_64 rng(opts.seed);
  const double cluster = opts.cluster_tol * chart.graph().total_length();
  std::vector<NumericCritical> found;
  for (std::size_t s = 0; s < opts.n_seeds; ++s) {
    VectorXd x0;
    try {
      x0 = random_feasible(chart, rng);
    } catch (const Error&) {
      continue;
    }
    auto x = newton_critical(chart, obj, x0, opts);
    if (!x) continue;
    bool merged = false;
    for (auto& f : found) {
      if (chart_distance(chart, f.x, *x) <= cluster) {
        ++f.hits;
        merged = true;
        break;
      }
    }
    if (!merged) found.push_back(describe_critical(chart, obj, *x, opts));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return found;
}

/// Inertia at a configuration that is critical up to `tol` (relative gradient).
/// A short Newton polish is applied first so representatives built from closed
/// forms are accepted at full precision.
inline InertiaTriple constrained_inertia(const AngleChart& chart, const TrigObjective& obj, const Configuration& c,
                                         const OracleOptions& opts = {}, double tol = 1e-7) {
  VectorXd x = chart.coordinates(c);
  const TangentData td0 = tangent_data(chart, obj, x);
  if (td0.gradient.norm() > tol * obj.scale())
    detail::fail(ErrorKind::NotCritical, "projected gradient " + std::to_string(td0.gradient.norm()));
  if (auto polished = newton_critical(chart, obj, x, opts); polished && chart_distance(chart, x, *polished) <= 1e-6 * chart.graph().total_length())
    x = *polished;
  return inertia_of(tangent_data(chart, obj, x), opts.eigen_zero);
}

// ---------------------------------------------------------------------------
// Finite-difference checks

struct FdReport {
  double gradient_error = 0.0;  // max abs error over max(|grad|, 1)-style scale
  double hessian_error = 0.0;
  bool passed = true;
  std::vector<std::string> offending;
};

/// Analytic gradient and Hessian of `model` against central differences.
/// `model` provides value(x), gradient(x), hessian(x).
template <class Model>
FdReport fd_check(const Model& model, const VectorXd& x, double grad_tol = 1e-6, double hess_tol = 1e-4,
                  bool throw_on_failure = true) {
  FdReport rep;
  const Eigen::Index n = x.size();
  const VectorXd g = model.gradient(x);
  const MatrixXd h = model.hessian(x);
  const double gscale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  const double hscale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  const double step1 = 1e-6, step2 = 1e-4;
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd xp = x, xm = x;
    xp(i) += step1;
    xm(i) -= step1;
    const double fd = (model.value(xp) - model.value(xm)) / (2 * step1);
    const double err = std::abs(fd - g(i)) / gscale;
    rep.gradient_error = std::max(rep.gradient_error, err);
    if (err > grad_tol) rep.offending.push_back("gradient[" + std::to_string(i) + "]");
  }
  const double f0 = model.value(x);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double fd;
      if (i == j) {
        VectorXd xp = x, xm = x;
        xp(i) += step2;
        xm(i) -= step2;
        fd = (model.value(xp) - 2 * f0 + model.value(xm)) / (step2 * step2);
      } else {
        VectorXd pp = x, pm = x, mp = x, mm = x;
        pp(i) += step2, pp(j) += step2;
        pm(i) += step2, pm(j) -= step2;
        mp(i) -= step2, mp(j) += step2;
        mm(i) -= step2, mm(j) -= step2;
        fd = (model.value(pp) - model.value(pm) - model.value(mp) + model.value(mm)) / (4 * step2 * step2);
      }
      const double err = std::abs(fd - h(i, j)) / hscale;
      rep.hessian_error = std::max(rep.hessian_error, err);
      if (err > hess_tol) rep.offending.push_back("hessian[" + std::to_string(i) + "," + std::to_string(j) + "]");
    }
  rep.passed = rep.offending.empty();
  if (!rep.passed && throw_on_failure) {
    std::string msg = "finite differences disagree at";
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.offending.size(), 8); ++k) msg += " " + rep.offending[k];
    detail::fail(ErrorKind::CheckFailed, msg);
  }
  return rep;
}

/// One closure equation of the chart as a plain function, for checking the Jacobian and constraint Hessians.
struct ChartConstraint {
  const AngleChart* chart;
  std::size_t row;

  double value(const VectorXd& x) const { return chart->residual(x)(static_cast<Eigen::Index>(row)); }
  VectorXd gradient(const VectorXd& x) const { return chart->jacobian(x).row(static_cast<Eigen::Index>(row)).transpose(); }
  MatrixXd hessian(const VectorXd& x) const {
    VectorXd w = VectorXd::Zero(static_cast<Eigen::Index>(chart->constraint_count()));
    w(static_cast<Eigen::Index>(row)) = 1.0;
    return chart->weighted_constraint_hessian(x, w);
  }
};

/// Objective and every constraint of the chart at x.
inline FdReport fd_check_chart(const AngleChart& chart, const TrigObjective& obj, const VectorXd& x) {
  FdReport total = fd_check(ChartFunction{&chart, &obj}, x);
  for (std::size_t r = 0; r < chart.constraint_count(); ++r) {
    const FdReport c = fd_check(ChartConstraint{&chart, r}, x);
    total.gradient_error = std::max(total.gradient_error, c.gradient_error);
    total.hessian_error = std::max(total.hessian_error, c.hessian_error);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Euler characteristic estimate

/// sum (-1)^negative over the critical points of a random invariant Morse
/// function (weighted squared distances between all vertex pairs). Equals the
/// Euler characteristic of a compact smooth reduced configuration space when
/// the search finds every critical point.
inline int euler_characteristic_estimate(const AngleChart& chart, const OracleOptions& opts = {}) {
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  std::vector<std::tuple<VertexId, VertexId, double>> pairs;
  const auto& vs = chart.graph().vertices();
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) pairs.emplace_back(vs[a], vs[b], w(rng));
  const TrigObjective obj = pair_distance_objective(chart, pairs);
  int chi = 0;
  for (const auto& c : find_critical_numeric(chart, obj, opts)) {
    if (c.inertia.zero != 0) detail::fail(ErrorKind::Degenerate, "random Morse function has a degenerate critical point");
    chi += (c.inertia.negative % 2 == 0) ? 1 : -1;
  }
  return chi;
}

}  // namespace linkarea
