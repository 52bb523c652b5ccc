#pragma once

#include <cmath>
#include <limits>

#include "riemann_entropy/errors.hpp"

// Numerically stable primitives for the standard Gaussian cumulative
// F(z) = (2*pi)^{-1/2} \int_{-inf}^z exp(-s^2/2) ds, its density, inverse,
// and the log of CDF differences.  All functions accept +/-infinity where
// that makes sense, so callers can use the conventions F(-inf)=0, F(+inf)=1
// without special cases.

namespace riemann_entropy::stats {

inline constexpr double inv_sqrt_2pi = 0.39894228040143267794;
inline constexpr double log_sqrt_2pi = 0.91893853320467274178;
inline constexpr double inv_sqrt2 = 0.70710678118654752440;

inline double infinity() { return std::numeric_limits<double>::infinity(); }

/// Gaussian density, (2*pi)^{-1/2} exp(-z^2/2).
inline double normal_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

/// ln of the Gaussian density; -inf at +/-infinity.
inline double log_normal_pdf(double z) {
  if (std::isinf(z)) return -infinity();
  return -0.5 * z * z - log_sqrt_2pi;
}

/// ln F(z), finite for every finite z.
inline double log_normal_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z > 0.0) {
    if (std::isinf(z)) return 0.0;
    // F(-z) <= 1/2, so log1p keeps full precision near ln 1 = 0
    return std::log1p(-0.5 * std::erfc(z * inv_sqrt2));
  }
  if (z == -infinity()) return -infinity();
  if (z > -36.0) return std::log(0.5 * std::erfc(-z * inv_sqrt2));
  // far lower tail: Mills-ratio asymptotic series, alternating and rapidly
  // convergent for |z| >= 36
  const double zz = z * z;
  double series = 1.0, term = 1.0;
  for (int i = 1; i <= 16; ++i) {
    term *= -(2.0 * i - 1.0) / zz;
    series += term;
    if (std::fabs(term) < 1e-18 * series) break;
  }
  return -0.5 * zz - std::log(-z) - log_sqrt_2pi + std::log(series);
}

/// Gaussian cumulative; total on the extended reals.
inline double normal_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z == infinity()) return 1.0;
  if (z == -infinity()) return 0.0;
  if (z >= -37.0) return 0.5 * std::erfc(-z * inv_sqrt2);
  return std::exp(log_normal_cdf(z));  // underflows to 0 below z ~ -38.6
}

/// Inverse cumulative on (0,1).  Throws ProbabilityOutOfRange otherwise.
inline double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw ProbabilityOutOfRange("normal_quantile: p must lie strictly in (0,1)");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);

  // Acklam's rational initial guess (p <= 1/2 needs two of his regions)
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q -
            2.400758277161838e+00) * q - 2.549732539343734e+00) * q +
            4.374664141464968e+00) * q + 2.938163982698783e+00) /
        ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q +
           2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0);
  } else {
    const double q = p - 0.5, r = q * q;
    x = (((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r -
            2.759285104469687e+02) * r + 1.383577518672690e+02) * r -
            3.066479806614716e+01) * r + 2.506628277459239e+00) * q /
        (((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r -
            1.556989798598866e+02) * r + 6.680131188771972e+01) * r -
            1.328068155288572e+01) * r + 1.0);
  }

  if (p < 1e-5) {
    // polish in log space; robust arbitrarily far into the tail
    const double logp = std::log(p);
    for (int it = 0; it < 4; ++it) {
      const double lf = log_normal_cdf(x);
      const double slope = std::exp(log_normal_pdf(x) - lf);  // d/dx ln F
      x -= (lf - logp) / slope;
    }
  } else {
    // two Halley corrections on F itself
    for (int it = 0; it < 2; ++it) {
      const double e = normal_cdf(x) - p;
      const double u = e / normal_pdf(x);
      x -= u / (1.0 + 0.5 * x * u);
    }
  }
  return x;
}

/// ln(F(x) - F(y)) for x > y, accurate in both tails and for tiny gaps.
/// Throws EmptyGap when x <= y.
inline double log_normal_cdf_gap(double x, double y) {
  if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
  if (!(x > y)) throw EmptyGap("log_normal_cdf_gap: requires x > y");
  const bool x_top = (x == infinity());
  const bool y_bot = (y == -infinity());
  if (x_top && y_bot) return 0.0;
  if (y_bot) return log_normal_cdf(x);
  if (x_top) return log_normal_cdf(-y);  // 1 - F(y) = F(-y)

  // reflect so the pair sits in the lower tail; the gap is unchanged
  if (x + y > 0.0) {
    const double t = x;
    x = -y;
    y = -t;
  }

  const double h = 0.5 * (x - y), m = 0.5 * (x + y);
  if (h * (1.0 + std::fabs(m)) <= 0.03) {
    // short gap: expand the integral of F' around the midpoint
    const double h2 = h * h, m2 = m * m;
    const double corr =
        h2 * (m2 - 1.0) / 6.0 + h2 * h2 * ((m2 - 6.0) * m2 + 3.0) / 120.0;
    return std::log(2.0 * h) + log_normal_pdf(m) + std::log1p(corr);
  }

  const double lx = log_normal_cdf(x), ly = log_normal_cdf(y);
  return lx + std::log(-std::expm1(ly - lx));
}

}  // namespace riemann_entropy::stats
