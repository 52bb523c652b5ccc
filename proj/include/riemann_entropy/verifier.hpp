#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/profile.hpp"

// Independent certification that a reconstructed profile is the entropy
// solution.  Everything is recomputed from the profile and the closed-form
// flux expressions; the entropy function and its gradient are never
// consulted, so optimizer defects cannot certify themselves.
//
// Per maximal family xi_k = ... = xi_l = c (with k' = k when the left piece
// is diffusive, k-1 otherwise):
//   equality   sum_{i=k'}^{l-1} (v_i - c)(u_{i+1} - u_i) - (A(u)'(c+) - A(u)'(c-)) = 0
//   inequality sum_{i=j}^{l-1} (v_i - c)(u_{i+1} - u_i) - A(u)'(c+) <= 0,  k' < j < l
// together with [A(u)] = 0 across the jump.

namespace riemann_entropy {

enum class JumpConfig { cpp, c0p, cp0, c00, group };

inline const char* jump_config_name(JumpConfig c) {
  switch (c) {
    case JumpConfig::cpp: return "c++";
    case JumpConfig::c0p: return "c0+";
    case JumpConfig::cp0: return "c+0";
    case JumpConfig::c00: return "c00";
    default: return "group";
  }
}

struct JumpCheck {
  double c = 0.0;
  int k = 0, l = 0;  // coordinate range of the family (1-based)
  JumpConfig config = JumpConfig::group;
  double u_minus = 0.0, u_plus = 0.0;
  double Aflux_minus = 0.0, Aflux_plus = 0.0;
  double rh_A_residual = 0.0;      // A(u(c+)) - A(u(c-))
  double rh_flux_residual = 0.0;   // grouped Rankine-Hugoniot combination
  std::vector<double> oleinik_margins;  // >= 0 required, one per nodal point
  double config_residual = 0.0;
  Discontinuity::Kind kind = Discontinuity::Kind::weak;
};

struct VerificationReport {
  std::vector<JumpCheck> per_jump;
  double max_equality_residual = 0.0;
  double min_inequality_margin = std::numeric_limits<double>::infinity();
  double tol = 0.0;         // as requested
  double scaled_tol = 0.0;  // tol * (1 + max|v|) * (beta - alpha)
  bool pass = true;
};

namespace detail {

inline double verification_scale(const ValidatedProblem& p) {
  double vmax = 0.0;
  for (double v : p.v()) vmax = std::max(vmax, std::fabs(v));
  return (1.0 + vmax) * (p.beta() - p.alpha());
}

inline JumpConfig classify(const ValidatedProblem& p, int k, int l) {
  if (l > k) return JumpConfig::group;
  const bool left = p.a()[k - 1] > 0.0;
  const bool right = p.a_ext(k) > 0.0;
  if (left && right) return JumpConfig::cpp;
  if (!left && right) return JumpConfig::c0p;
  if (left && !right) return JumpConfig::cp0;
  return JumpConfig::c00;
}

}  // namespace detail

inline VerificationReport verify(const SelfSimilarProfile& prof, double tol = 1e-8) {
  const ValidatedProblem& p = prof.problem;
  VerificationReport rep;
  rep.tol = tol;
  rep.scaled_tol = tol * detail::verification_scale(p);

  const FluxFunctions fluxes(p);
  const int d = static_cast<int>(prof.xi.size());
  int k = 1;
  while (k <= d) {
    int l = k;
    while (l + 1 <= d && prof.xi[l] == prof.xi[l - 1]) ++l;

    JumpCheck chk;
    chk.c = prof.xi[static_cast<std::size_t>(k) - 1];
    chk.k = k;
    chk.l = l;
    chk.config = detail::classify(p, k, l);
    const int k_prime = p.a()[k - 1] > 0.0 ? k : k - 1;
    chk.u_minus = p.u()[k_prime];
    chk.u_plus = p.u()[l];
    chk.kind = chk.u_minus < chk.u_plus ? Discontinuity::Kind::strong
                                        : Discontinuity::Kind::weak;
    chk.Aflux_minus = detail::aflux_minus(prof, k);
    chk.Aflux_plus = detail::aflux_plus(prof, l);

    chk.rh_A_residual = A_eval(fluxes, chk.u_plus) - A_eval(fluxes, chk.u_minus);

    double sum = 0.0;  // sum_{i=k'}^{l-1} (v_i - c) du_i
    for (int i = k_prime; i <= l - 1; ++i) sum += (p.v()[i] - chk.c) * p.du(i);
    chk.rh_flux_residual = sum - (chk.Aflux_plus - chk.Aflux_minus);

    for (int j = k_prime + 1; j <= l - 1; ++j) {
      double tail = 0.0;
      for (int i = j; i <= l - 1; ++i) tail += (p.v()[i] - chk.c) * p.du(i);
      chk.oleinik_margins.push_back(chk.Aflux_plus - tail);
    }

    chk.config_residual = chk.config == JumpConfig::cpp
                              ? chk.Aflux_plus - chk.Aflux_minus
                              : chk.rh_flux_residual;

    rep.max_equality_residual = std::max(
        rep.max_equality_residual,
        std::max(std::fabs(chk.rh_A_residual), std::fabs(chk.rh_flux_residual)));
    for (double m : chk.oleinik_margins) {
      rep.min_inequality_margin = std::min(rep.min_inequality_margin, m);
    }
    rep.per_jump.push_back(std::move(chk));
    k = l + 1;
  }

  rep.pass = rep.max_equality_residual <= rep.scaled_tol &&
             rep.min_inequality_margin >= -rep.scaled_tol;
  return rep;
}

namespace detail {

inline void require_isolated(const SelfSimilarProfile& prof, int k, const char* who) {
  const int d = static_cast<int>(prof.xi.size());
  if (k < 1 || k > d) throw WrongConfiguration(std::string(who) + ": index out of range");
  const double c = prof.xi[static_cast<std::size_t>(k) - 1];
  if ((k > 1 && prof.xi[k - 2] == c) || (k < d && prof.xi[k] == c)) {
    throw WrongConfiguration(std::string(who) + ": coordinate is not isolated");
  }
}

}  // namespace detail

/// Residual of the weak-discontinuity matching condition at an isolated
/// coordinate with diffusive pieces on both sides: A(u)'(c+) - A(u)'(c-).
inline double check_cpp_condition(const SelfSimilarProfile& prof, int k) {
  detail::require_isolated(prof, k, "check_cpp_condition");
  const ValidatedProblem& p = prof.problem;
  if (!(p.a()[k - 1] > 0.0) || !(p.a_ext(k) > 0.0)) {
    throw WrongConfiguration("check_cpp_condition: needs diffusive pieces on both sides");
  }
  return detail::aflux_plus(prof, k) - detail::aflux_minus(prof, k);
}

/// Residual of the strong-jump condition at an isolated coordinate with a
/// constant piece on the left and a diffusive one on the right:
/// (v_{k-1} - xi_k)(u_k - u_{k-1}) - A(u)'(c+).
inline double check_c0p_condition(const SelfSimilarProfile& prof, int k) {
  detail::require_isolated(prof, k, "check_c0p_condition");
  const ValidatedProblem& p = prof.problem;
  if (p.a()[k - 1] > 0.0 || !(p.a_ext(k) > 0.0)) {
    throw WrongConfiguration("check_c0p_condition: needs a_{k-1} = 0 < a_k");
  }
  const double c = prof.xi[static_cast<std::size_t>(k) - 1];
  return (p.v()[k - 1] - c) * p.du(k - 1) - detail::aflux_plus(prof, k);
}

}  // namespace riemann_entropy
