#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "riemann_entropy/entropy.hpp"
#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/stats.hpp"

// The self-similar solution u(xi) determined by a feasible speed vector:
// on (xi_k, xi_{k+1}) either the rescaled Gaussian-cumulative bridge from u_k
// to u_{k+1} (piece with a_k > 0) or the constant u_k (piece with a_k = 0).
// Pieces of merged coordinates are empty but kept in the table so piece k
// always corresponds to the state interval (u_k, u_{k+1}).

namespace riemann_entropy {

struct ProfilePiece {
  double u_lo = 0.0, u_hi = 0.0;  // states carried by the piece
  double v = 0.0, a = 0.0;
  double xi_lo = 0.0, xi_hi = 0.0;
  bool diffusive = false;
  double z_lo = 0.0, z_hi = 0.0;  // (xi - v)/a at the edges, when diffusive
  double log_norm = 0.0;          // ln(F(z_hi) - F(z_lo)), when diffusive
};

struct Discontinuity {
  enum class Kind { weak, strong };
  double c = 0.0;                // speed of the ray x = c t
  double u_minus = 0.0, u_plus = 0.0;
  double Aflux_minus = 0.0, Aflux_plus = 0.0;  // one-sided A(u)' limits
  Kind kind = Kind::weak;
};

struct SelfSimilarProfile {
  ValidatedProblem problem;
  std::vector<double> xi;  // interior speeds xi_1..xi_d
  std::vector<ProfilePiece> pieces;
};

inline SelfSimilarProfile build_profile(const ValidatedProblem& p, const SpeedVector& s) {
  detail::check_dimension(p, s, "build_profile");
  if (!in_cone(p, s)) {
    throw DegenerateGap("build_profile: speed vector leaves the ordered cone");
  }
  SelfSimilarProfile prof{p, s.xi, {}};
  prof.pieces.reserve(static_cast<std::size_t>(p.d()) + 1);
  for (int k = 0; k <= p.d(); ++k) {
    ProfilePiece piece;
    piece.xi_lo = detail::xi_at(s, k);
    piece.xi_hi = detail::xi_at(s, k + 1);
    piece.u_lo = p.u()[k];
    piece.a = p.a_ext(k);
    piece.v = k < p.n() ? p.v()[k] : 0.0;
    piece.diffusive = piece.a > 0.0;
    if (piece.diffusive) {
      piece.u_hi = p.u()[k + 1];
      piece.z_lo = (piece.xi_lo - piece.v) / piece.a;
      piece.z_hi = (piece.xi_hi - piece.v) / piece.a;
      if (!(piece.z_hi > piece.z_lo)) {
        throw DegenerateGap("build_profile: empty normalizer at piece " + std::to_string(k));
      }
      piece.log_norm = stats::log_normal_cdf_gap(piece.z_hi, piece.z_lo);
    } else {
      piece.u_hi = piece.u_lo;
    }
    prof.pieces.push_back(piece);
  }
  return prof;
}

/// u(xi), right-continuous at jumps; u(-inf) = alpha, u(+inf) = beta.
inline double eval(const SelfSimilarProfile& prof, double xi_point) {
  if (xi_point == -stats::infinity()) return prof.problem.alpha();
  if (xi_point == stats::infinity()) return prof.problem.beta();
  // right-continuity: the piece whose left edge is the last xi_k <= xi_point
  const std::size_t k = static_cast<std::size_t>(
      std::upper_bound(prof.xi.begin(), prof.xi.end(), xi_point) - prof.xi.begin());
  const ProfilePiece& piece = prof.pieces[k];
  if (!piece.diffusive) return piece.u_lo;
  const double z = (xi_point - piece.v) / piece.a;
  if (z <= piece.z_lo) return piece.u_lo;
  if (z >= piece.z_hi) return piece.u_hi;
  const double width = piece.u_hi - piece.u_lo;
  // evaluate from the nearer edge so tail ratios stay accurate
  if (z - piece.z_lo <= piece.z_hi - z) {
    const double ratio = std::exp(stats::log_normal_cdf_gap(z, piece.z_lo) - piece.log_norm);
    return piece.u_lo + width * std::min(ratio, 1.0);
  }
  const double ratio = std::exp(stats::log_normal_cdf_gap(piece.z_hi, z) - piece.log_norm);
  return piece.u_hi - width * std::min(ratio, 1.0);
}

/// du/dxi from the closed form of the piece containing xi_point (right limit
/// at jumps); zero on constant pieces.
inline double eval_derivative(const SelfSimilarProfile& prof, double xi_point) {
  if (std::isinf(xi_point)) return 0.0;
  const std::size_t k = static_cast<std::size_t>(
      std::upper_bound(prof.xi.begin(), prof.xi.end(), xi_point) - prof.xi.begin());
  const ProfilePiece& piece = prof.pieces[k];
  if (!piece.diffusive) return 0.0;
  const double z = (xi_point - piece.v) / piece.a;
  return (piece.u_hi - piece.u_lo) / piece.a *
         std::exp(stats::log_normal_pdf(z) - piece.log_norm);
}

namespace detail {

// A(u)'(c-) for the group starting at coordinate k (1-based): the derivative
// carried by piece k-1 at its upper edge, zero when that piece is constant.
inline double aflux_minus(const SelfSimilarProfile& prof, int k) {
  const ProfilePiece& piece = prof.pieces[static_cast<std::size_t>(k) - 1];
  if (!piece.diffusive) return 0.0;
  return piece.a * (piece.u_hi - piece.u_lo) *
         std::exp(stats::log_normal_pdf(piece.z_hi) - piece.log_norm);
}

// A(u)'(c+) for the group ending at coordinate l: piece l at its lower edge.
inline double aflux_plus(const SelfSimilarProfile& prof, int l) {
  const ProfilePiece& piece = prof.pieces[static_cast<std::size_t>(l)];
  if (!piece.diffusive) return 0.0;
  return piece.a * (piece.u_hi - piece.u_lo) *
         std::exp(stats::log_normal_pdf(piece.z_lo) - piece.log_norm);
}

}  // namespace detail

/// One catalog entry per maximal family of coinciding speeds.  u(c-) = u_{k'}
/// with k' = k when the left piece is diffusive and k-1 otherwise; u(c+) = u_l.
inline std::vector<Discontinuity> discontinuities(const SelfSimilarProfile& prof) {
  std::vector<Discontinuity> out;
  const int d = static_cast<int>(prof.xi.size());
  int k = 1;
  while (k <= d) {
    int l = k;
    while (l + 1 <= d && prof.xi[l] == prof.xi[l - 1]) ++l;
    Discontinuity disc;
    disc.c = prof.xi[static_cast<std::size_t>(k) - 1];
    const bool left_diffusive = prof.problem.a()[k - 1] > 0.0;
    const int k_prime = left_diffusive ? k : k - 1;
    disc.u_minus = prof.problem.u()[k_prime];
    disc.u_plus = prof.problem.u()[l];
    disc.Aflux_minus = detail::aflux_minus(prof, k);
    disc.Aflux_plus = detail::aflux_plus(prof, l);
    disc.kind = disc.u_minus < disc.u_plus ? Discontinuity::Kind::strong
                                           : Discontinuity::Kind::weak;
    out.push_back(disc);
    k = l + 1;
  }
  return out;
}

struct SampleRow {
  enum class Side { none, minus, plus };
  double xi = 0.0;
  double u = 0.0;
  Side side = Side::none;
};

/// Equispaced samples over [xi_min, xi_max] plus a (minus, plus) row pair at
/// every discontinuity inside the window.
inline std::vector<SampleRow> sample(const SelfSimilarProfile& prof, double xi_min,
                                     double xi_max, int count) {
  if (!(xi_min < xi_max) || count < 2) {
    throw BadWindow("sample: need xi_min < xi_max and count >= 2");
  }
  std::vector<SampleRow> rows;
  rows.reserve(static_cast<std::size_t>(count) + 2 * prof.xi.size());
  for (int i = 0; i < count; ++i) {
    const double x = xi_min + (xi_max - xi_min) * i / (count - 1);
    rows.push_back(SampleRow{x, eval(prof, x), SampleRow::Side::none});
  }
  for (const Discontinuity& disc : discontinuities(prof)) {
    if (!(disc.c > xi_min) || !(disc.c < xi_max)) continue;
    rows.push_back(SampleRow{disc.c, disc.u_minus, SampleRow::Side::minus});
    rows.push_back(SampleRow{disc.c, disc.u_plus, SampleRow::Side::plus});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SampleRow& a, const SampleRow& b) {
    auto rank = [](SampleRow::Side s) {
      return s == SampleRow::Side::minus ? 0 : (s == SampleRow::Side::plus ? 1 : 2);
    };
    if (a.xi != b.xi) return a.xi < b.xi;
    return rank(a.side) < rank(b.side);
  });
  return rows;
}

inline const char* side_name(SampleRow::Side s) {
  switch (s) {
    case SampleRow::Side::minus: return "minus";
    case SampleRow::Side::plus: return "plus";
    default: return "";
  }
}

}  // namespace riemann_entropy
