#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/stats.hpp"
#include "riemann_entropy/tridiagonal.hpp"

// The entropy of a speed vector xi = (xi_1 <= ... <= xi_d):
//
//   E(xi) = - sum_{k: a_k>0} a_k^2 (u_{k+1}-u_k) ln(F(z_{k+1}^k) - F(z_k^k))
//           + 1/2 sum_{k: a_k=0} (u_{k+1}-u_k) (xi_{k+1} - v_k)^2,
//
// with z_j^k = (xi_j - v_k)/a_k and the conventions xi_0 = -inf,
// xi_{d+1} = +inf.  E is strictly convex and coercive on the ordered cone;
// its unique minimizer yields the self-similar entropy solution.

namespace riemann_entropy {

// A point of the ordered cone Omega: nondecreasing coordinates, strictly
// increasing across positive-diffusion pieces.
struct SpeedVector {
  std::vector<double> xi;

  int size() const { return static_cast<int>(xi.size()); }
  double operator[](int i) const { return xi[static_cast<std::size_t>(i)]; }
};

// Explicit compact box containing the sublevel set E <= c.
struct CoercivityBox {
  double delta;                  // minimum admissible F-gap, exp(-c/m)
  double r1;                     // lower bound for xi_1
  double r2;                     // upper bound for xi_d
  std::vector<double> min_gaps;  // a_k * delta for k = 1..d-1
};

namespace detail {

inline void check_dimension(const ValidatedProblem& p, const SpeedVector& s, const char* who) {
  if (s.size() != p.d()) {
    throw DimensionMismatch(std::string(who) + ": speed vector has length " +
                            std::to_string(s.size()) + ", expected d = " +
                            std::to_string(p.d()));
  }
}

// coordinate accessor with the boundary conventions xi_0=-inf, xi_{d+1}=+inf
inline double xi_at(const SpeedVector& s, int j) {
  if (j <= 0) return -stats::infinity();
  if (j > s.size()) return stats::infinity();
  return s.xi[static_cast<std::size_t>(j) - 1];
}

}  // namespace detail

/// Membership in the cone Omega (gaps at a_k > 0 pieces must be open).
inline bool in_cone(const ValidatedProblem& p, const SpeedVector& s) {
  if (s.size() != p.d()) return false;
  for (int j = 0; j + 1 < s.size(); ++j) {
    const double lo = s.xi[j], hi = s.xi[j + 1];
    if (p.a()[j + 1] > 0.0 ? !(hi > lo) : !(hi >= lo)) return false;
  }
  return true;
}

/// E(xi).  Returns +infinity when a positive-diffusion gap is closed, so the
/// objective acts as its own barrier on the cone boundary.
inline double entropy_value(const ValidatedProblem& p, const SpeedVector& s) {
  detail::check_dimension(p, s, "entropy_value");
  double total = 0.0;
  for (int k = 0; k < p.n(); ++k) {
    const double ak = p.a()[k];
    if (ak > 0.0) {
      const double zlo = (detail::xi_at(s, k) - p.v()[k]) / ak;
      const double zhi = (detail::xi_at(s, k + 1) - p.v()[k]) / ak;
      if (!(zhi > zlo)) return stats::infinity();
      total -= ak * ak * p.du(k) * stats::log_normal_cdf_gap(zhi, zlo);
    } else {
      const double t = detail::xi_at(s, k + 1) - p.v()[k];
      total += 0.5 * p.du(k) * t * t;
    }
  }
  return total;
}

/// Gradient of E.  Requires every positive-diffusion gap open (DegenerateGap
/// otherwise); coinciding coordinates across a_k = 0 pieces are fine.
inline std::vector<double> entropy_gradient(const ValidatedProblem& p, const SpeedVector& s) {
  detail::check_dimension(p, s, "entropy_gradient");
  const int d = p.d();
  std::vector<double> g(static_cast<std::size_t>(d), 0.0);
  for (int k = 0; k < p.n(); ++k) {
    const double ak = p.a()[k];
    if (ak > 0.0) {
      const double zlo = (detail::xi_at(s, k) - p.v()[k]) / ak;
      const double zhi = (detail::xi_at(s, k + 1) - p.v()[k]) / ak;
      if (!(zhi > zlo)) {
        throw DegenerateGap("entropy_gradient: closed gap at piece " + std::to_string(k));
      }
      const double lg = stats::log_normal_cdf_gap(zhi, zlo);
      const double c = ak * p.du(k);
      if (k + 1 <= d) g[k] -= c * std::exp(stats::log_normal_pdf(zhi) - lg);
      if (k >= 1) g[k - 1] += c * std::exp(stats::log_normal_pdf(zlo) - lg);
    } else if (k + 1 <= d) {
      g[k] += p.du(k) * (detail::xi_at(s, k + 1) - p.v()[k]);
    }
  }
  return g;
}

// Second derivatives of P(x,y) = -ln(F(x) - F(y)) on x > y; the 2x2 block
// from which the entropy Hessian is assembled.
struct PHessian {
  double xx, xy, yy;
};

inline PHessian p_hessian(double x, double y) {
  const double lg = stats::log_normal_cdf_gap(x, y);
  const double rx = std::exp(stats::log_normal_pdf(x) - lg);
  const double ry = std::exp(stats::log_normal_pdf(y) - lg);
  PHessian h;
  h.xx = std::isinf(x) ? 0.0 : rx * (x + rx);
  h.yy = std::isinf(y) ? 0.0 : ry * (ry - y);
  h.xy = -rx * ry;
  return h;
}

/// Hessian of E: symmetric tridiagonal (each piece couples only xi_k, xi_{k+1});
/// positive definite everywhere on the cone.
inline SymTridiagonal entropy_hessian(const ValidatedProblem& p, const SpeedVector& s) {
  detail::check_dimension(p, s, "entropy_hessian");
  const int d = p.d();
  SymTridiagonal h;
  h.diag.assign(static_cast<std::size_t>(d), 0.0);
  h.off.assign(d > 1 ? static_cast<std::size_t>(d) - 1 : 0, 0.0);
  for (int k = 0; k < p.n(); ++k) {
    const double ak = p.a()[k];
    if (ak > 0.0) {
      const double zlo = (detail::xi_at(s, k) - p.v()[k]) / ak;
      const double zhi = (detail::xi_at(s, k + 1) - p.v()[k]) / ak;
      if (!(zhi > zlo)) {
        throw DegenerateGap("entropy_hessian: closed gap at piece " + std::to_string(k));
      }
      const PHessian blk = p_hessian(zhi, zlo);
      if (k + 1 <= d) h.diag[k] += p.du(k) * blk.xx;
      if (k >= 1) h.diag[k - 1] += p.du(k) * blk.yy;
      if (k >= 1 && k + 1 <= d) h.off[k - 1] += p.du(k) * blk.xy;
    } else if (k + 1 <= d) {
      h.diag[k] += p.du(k);
    }
  }
  return h;
}

/// E1(xi) = E(xi) + sum_{k: a_k>0} a_k^2 (u_{k+1}-u_k) ln((u_{k+1}-u_k)/a_k).
/// Differs from E by a constant, so both have the same minimizer; E1 is the
/// variant whose refinement limit is the continuum functional.
inline double entropy_alt_value(const ValidatedProblem& p, const SpeedVector& s) {
  double shift = 0.0;
  for (int k = 0; k < p.n(); ++k) {
    const double ak = p.a()[k];
    if (ak > 0.0) shift += ak * ak * p.du(k) * std::log(p.du(k) / ak);
  }
  return entropy_value(p, s) + shift;
}

/// Trapezoid discretization of
///   J(xi) = int_alpha^beta [ (xi(u)-v(u))^2/2 - a(u)^2 ln(xi'(u)) ] du
/// over a sample grid, with xi' by centered differences.
inline double continuum_functional(std::span<const double> u_grid,
                                   std::span<const double> v_samples,
                                   std::span<const double> a_samples,
                                   std::span<const double> xi_samples) {
  const std::size_t m = u_grid.size();
  if (m < 2 || v_samples.size() != m || a_samples.size() != m || xi_samples.size() != m) {
    throw LengthMismatch("continuum_functional: need four equal-length tables, size >= 2");
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!(u_grid[i] < u_grid[i + 1]) || !(xi_samples[i] < xi_samples[i + 1])) {
      throw NonMonotoneSamples("continuum_functional: u and xi samples must strictly increase");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(a_samples[i] >= 0.0)) {
      throw NegativeDiffusion("continuum_functional: a(u) samples must be >= 0");
    }
  }
  std::vector<double> integrand(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = (i + 1 == m) ? i : i + 1;
    const double slope = (xi_samples[hi] - xi_samples[lo]) / (u_grid[hi] - u_grid[lo]);
    const double dev = xi_samples[i] - v_samples[i];
    integrand[i] = 0.5 * dev * dev - a_samples[i] * a_samples[i] * std::log(slope);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    total += 0.5 * (u_grid[i + 1] - u_grid[i]) * (integrand[i] + integrand[i + 1]);
  }
  return total;
}

/// The compact box of the sublevel set E <= c:
///   delta = exp(-c/m),  m = min over a_k > 0 of a_k^2 (u_{k+1}-u_k),
///   r1 = v_0 + min(a_0 F^-1(delta), -sqrt(2c/(u_1-u_0))),
///   r2 = v_{n-1} + max(-a_{n-1} F^-1(delta), sqrt(2c/(u_n-u_{n-1}))),
///   gap bounds xi_{k+1} - xi_k >= a_k delta.
inline CoercivityBox coercivity_box(const ValidatedProblem& p, double c) {
  if (!(c >= 0.0)) throw NegativeLevel("coercivity_box: level c must be >= 0");
  if (p.d() < 1) throw DimensionMismatch("coercivity_box: requires d >= 1");

  double m = stats::infinity();
  bool any_diffusive = false;
  for (int k = 0; k < p.n(); ++k) {
    if (p.a()[k] > 0.0) {
      any_diffusive = true;
      m = std::min(m, p.a()[k] * p.a()[k] * p.du(k));
    }
  }
  const double delta = any_diffusive ? std::exp(-c / m) : 0.0;

  // quantile terms guard the degenerate levels: delta >= 1 when c = 0 and
  // delta may underflow to 0 for huge c/m; the min/max picks the live branch
  auto scaled_quantile = [&](double scale) -> double {
    if (scale <= 0.0) return 0.0;
    if (delta >= 1.0) return stats::infinity();
    if (delta <= 0.0) return -stats::infinity();
    return scale * stats::normal_quantile(delta);
  };

  CoercivityBox box;
  box.delta = delta;
  const int n = p.n();
  box.r1 = p.v()[0] + std::min(scaled_quantile(p.a()[0]), -std::sqrt(2.0 * c / p.du(0)));
  const double tail = scaled_quantile(p.a()[n - 1]);
  box.r2 = p.v()[n - 1] + std::max(-tail, std::sqrt(2.0 * c / p.du(n - 1)));
  for (int k = 1; k <= p.d() - 1; ++k) box.min_gaps.push_back(p.a()[k] * delta);
  return box;
}

}  // namespace riemann_entropy
