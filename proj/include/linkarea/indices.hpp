#pragma once

// Closed-form Morse and Bott-Morse indices. Geometry is reduced to integers
// (e, omega, f, orientation signs) here and the index arithmetic is exact.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "linkarea/cyclic.hpp"
#include "linkarea/errors.hpp"
#include "linkarea/geometry.hpp"

namespace linkarea {

/// An aligned open chain: r edges, f of them pointing along W (start -> end).
struct OpenChainCritical {
  int r = 0;
  int f = 0;
  Vec2 direction = Vec2::Zero();
};

inline void validate(const OpenChainCritical& z) {
  if (z.r < 1 || z.f < 1 || z.f > z.r)
    detail::fail(ErrorKind::NotAligned, "forward count " + std::to_string(z.f) + " invalid for " +
                                            std::to_string(z.r) + " edges");
}

/// Reads r, f and W off a realized chain; NotAligned unless the path lies on a line.
inline OpenChainCritical open_chain_critical_from(const Configuration& c, const std::vector<VertexId>& path,
                                                  double tol) {
  if (path.size() < 2) detail::fail(ErrorKind::InvalidInput, "a chain needs at least one edge");
  if (!is_aligned(c, path, tol)) detail::fail(ErrorKind::NotAligned, "chain is not aligned");
  OpenChainCritical z;
  z.r = static_cast<int>(path.size()) - 1;
  z.direction = c.at(path.back()) - c.at(path.front());
  if (z.direction.norm() <= tol) detail::fail(ErrorKind::NotAligned, "chain endpoints coincide");
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    if ((c.at(path[k + 1]) - c.at(path[k])).dot(z.direction) > 0.0) ++z.f;
  validate(z);
  return z;
}

inline int open_chain_index(const OpenChainCritical& z) {
  validate(z);
  return z.f - 1;
}

/// e - 1 - 2 omega when sum eps tan(alpha) > 0, e - 2 - 2 omega otherwise.
inline int cyclic_index(const CyclicPolygon& p, double guard = 1e-7) {
  double sum = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < p.eps.size(); ++i) {
    if (std::abs(p.alphas[i] - 0.5 * std::numbers::pi) <= 1e-12) {
      // the sum diverges; its sign is eps_i
      const int limit = p.positive - (p.eps[i] > 0 ? 1 : 2) - 2 * p.winding;
      detail::fail(ErrorKind::Degenerate, "edge " + std::to_string(i) + " is a diameter; limit index " +
                                              std::to_string(limit));
    }
    const double t = p.eps[i] * std::tan(p.alphas[i]);
    sum += t;
    scale += std::abs(t);
  }
  if (std::abs(sum) < guard * scale)
    detail::fail(ErrorKind::NonGeneric, "sum of eps*tan(alpha) vanishes; degenerate critical point");
  return p.positive - (sum > 0.0 ? 1 : 2) - 2 * p.winding;
}

/// Contribution of an aligned chain whose flanking cells have centers oa, ob.
inline int aligned_nu(const OpenChainCritical& z, const Vec2& oa, const Vec2& ob, double tol = 1e-9) {
  validate(z);
  if ((ob - oa).norm() < tol) detail::fail(ErrorKind::CoincidingCenters, "the two circumcenters coincide");
  return cross(z.direction, ob - oa) > 0.0 ? z.f - 1 : z.r - z.f;
}

inline int three_chain_aligned_index(int mu_a, int mu_b, int nu) { return mu_a + mu_b + nu; }

inline int ptt_index(const std::vector<int>& cell_indices, const std::vector<int>& chain_nus) {
  int total = 0;
  for (int m : cell_indices) total += m;
  for (int v : chain_nus) total += v;
  return total;
}

/// Lagrange matrix of the [2,2;2] three-chain in the angles at the free joints.
template <class T>
std::array<std::array<T, 3>, 3> lagrange_matrix_222(T a1, T a2, T b1, T b2, T c1, T c2, T alpha, T beta, T gamma) {
  using std::cos, std::sin;
  const T a = a1 * a2, b = b1 * b2, c = c1 * c2;
  return {{{a * cos(alpha), b * cos(beta), T(0)},
           {2 * a * sin(alpha), -2 * b * sin(beta), T(0)},
           {2 * a * sin(alpha), T(0), -2 * c * sin(gamma)}}};
}

template <class T>
T lagrange_det_222(T a1, T a2, T b1, T b2, T c1, T c2, T alpha, T beta, T gamma) {
  using std::sin;
  return 4 * c1 * c2 * a1 * a2 * b1 * b2 * sin(gamma) * sin(alpha + beta);
}

template <class T>
T det3(const std::array<std::array<T, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct IndexReport {
  int index = 0;
  int manifold_dim = 0;
  std::vector<std::pair<std::string, int>> breakdown;
};

}  // namespace linkarea
