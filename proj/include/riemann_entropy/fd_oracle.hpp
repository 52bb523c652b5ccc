#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/profile.hpp"

// Brute-force finite-volume solver for u_t + phi(u)_x - t A(u)_xx = 0 with
// Riemann data, used to cross-validate the constructed self-similar profile.
// Advection uses the Engquist-Osher splitting of the piecewise-linear phi
// (exact split: slopes separated by sign), diffusion an explicit centered
// flux t (A(u_{i+1}) - A(u_i))/h.  The combined step restriction
//   dt (max|v|/h + 2 (t+dt) max a^2 / h^2) <= cfl < 1
// keeps the scheme monotone, so cell values respect the data bounds and
// spatial monotonicity at every step.

namespace riemann_entropy {

struct FDParams {
  double L = 0.0;       // half-width of the computational domain
  double h = 0.01;      // cell size
  double t_final = 1.0;
  double cfl = 0.4;
};

struct FDSolution {
  std::vector<double> x_centers;
  std::vector<double> values;
  double h = 0.0;
  double t_final = 0.0;
  long steps_taken = 0;
  double boundary_flux_in = 0.0;  // time integral of the net inflow
};

class FDSolver {
 public:
  FDSolver(const ValidatedProblem& p, const FDParams& params)
      : problem_(p), params_(params) {
    if (!(params.cfl > 0.0) || params.cfl >= 1.0) {
      throw UnstableParameters("fd: cfl must lie in (0, 1)");
    }
    if (!(params.h > 0.0) || !(params.t_final >= 0.0)) {
      throw UnstableParameters("fd: need h > 0 and t_final >= 0");
    }
    double vmax = 0.0, amax = 0.0;
    for (double v : p.v()) vmax = std::max(vmax, std::fabs(v));
    for (double a : p.a()) amax = std::max(amax, a);
    const double needed =
        params.t_final * vmax + 6.0 * amax * std::sqrt(params.t_final) + 1.0;
    if (params.L < needed) {
      throw UnstableParameters("fd: domain half-width L must be at least " +
                               std::to_string(needed));
    }
    vmax_ = vmax;
    max_a2_ = amax * amax;

    // align a cell interface with x = 0 so the Riemann data has exact averages
    half_cells_ = static_cast<std::size_t>(std::ceil(params.L / params.h - 1e-12));
    const double L_adj = static_cast<double>(half_cells_) * params.h;
    const std::size_t n_cells = 2 * half_cells_;
    x_.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
      x_[i] = -L_adj + (static_cast<double>(i) + 0.5) * params.h;
    }

    // node tables for phi+ (slopes max(v,0)), phi- (slopes min(v,0)) and A
    const auto& u = p.u();
    const std::size_t n = p.v().size();
    nodes_ = u;
    phip_nodes_.assign(n + 1, 0.0);
    phim_nodes_.assign(n + 1, 0.0);
    A_nodes_.assign(n + 1, 0.0);
    slope_p_.resize(n);
    slope_m_.resize(n);
    slope_A_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = u[k + 1] - u[k];
      slope_p_[k] = std::max(p.v()[k], 0.0);
      slope_m_[k] = std::min(p.v()[k], 0.0);
      slope_A_[k] = p.a()[k] * p.a()[k];
      phip_nodes_[k + 1] = phip_nodes_[k] + slope_p_[k] * w;
      phim_nodes_[k + 1] = phim_nodes_[k] + slope_m_[k] * w;
      A_nodes_[k + 1] = A_nodes_[k] + slope_A_[k] * w;
    }
  }

  struct State {
    double t = 0.0;
    std::vector<double> u;
    long steps = 0;
    double boundary_flux_in = 0.0;
  };

  State initial_state() const {
    State st;
    st.u.assign(x_.size(), 0.0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      st.u[i] = i < half_cells_ ? problem_.alpha() : problem_.beta();
    }
    return st;
  }

  const std::vector<double>& x_centers() const { return x_; }

  /// Advance one step; returns the dt taken (0 when already at t_final).
  double step(State& st) const {
    const double remaining = params_.t_final - st.t;
    if (!(remaining > 0.0)) return 0.0;
    double dt = stable_dt(st.t);
    dt = std::min(dt, remaining);

    const std::size_t n_cells = st.u.size();
    const double h = params_.h;
    // cell tables with ghost entries (Dirichlet alpha / beta)
    scratch_A_.resize(n_cells + 2);
    scratch_p_.resize(n_cells + 2);
    scratch_m_.resize(n_cells + 2);
    auto fill = [&](std::size_t slot, double value) {
      scratch_A_[slot] = pl_eval(A_nodes_, slope_A_, value);
      scratch_p_[slot] = pl_eval(phip_nodes_, slope_p_, value);
      scratch_m_[slot] = pl_eval(phim_nodes_, slope_m_, value);
    };
    fill(0, problem_.alpha());
    for (std::size_t i = 0; i < n_cells; ++i) fill(i + 1, st.u[i]);
    fill(n_cells + 1, problem_.beta());

    // interface fluxes: advective phi+(ul) + phi-(ur), diffusive t dA/h
    flux_.resize(n_cells + 1);
    for (std::size_t f = 0; f <= n_cells; ++f) {
      const double adv = scratch_p_[f] + scratch_m_[f + 1];
      const double diff = st.t * (scratch_A_[f + 1] - scratch_A_[f]) / h;
      flux_[f] = adv - diff;
    }
    const double lambda = dt / h;
    for (std::size_t i = 0; i < n_cells; ++i) {
      st.u[i] -= lambda * (flux_[i + 1] - flux_[i]);
    }
    st.boundary_flux_in += dt * (flux_.front() - flux_.back());
    st.t += dt;
    ++st.steps;
    return dt;
  }

  FDSolution run() const {
    State st = initial_state();
    while (step(st) > 0.0) {
    }
    FDSolution sol;
    sol.x_centers = x_;
    sol.values = std::move(st.u);
    sol.h = params_.h;
    sol.t_final = params_.t_final;
    sol.steps_taken = st.steps;
    sol.boundary_flux_in = st.boundary_flux_in;
    return sol;
  }

 private:
  double stable_dt(double t) const {
    const double adv = vmax_ / params_.h;
    const double diff = 2.0 * max_a2_ / (params_.h * params_.h);
    if (diff > 0.0) {
      // solve dt (adv + diff (t + dt)) = cfl so the bound holds at end time
      const double b = adv + diff * t;
      return (-b + std::sqrt(b * b + 4.0 * diff * params_.cfl)) / (2.0 * diff);
    }
    if (adv > 0.0) return params_.cfl / adv;
    return params_.t_final;  // constant coefficients are trivial
  }

  double pl_eval(const std::vector<double>& values, const std::vector<double>& slopes,
                 double x) const {
    // Riemann data and the monotone update keep x inside [alpha, beta]
    const std::size_t n = slopes.size();
    std::size_t k = 0;
    while (k + 1 < n && x >= nodes_[k + 1]) ++k;
    return values[k] + slopes[k] * (x - nodes_[k]);
  }

  const ValidatedProblem& problem_;
  FDParams params_;
  std::size_t half_cells_ = 0;
  double vmax_ = 0.0, max_a2_ = 0.0;
  std::vector<double> x_;
  std::vector<double> nodes_, phip_nodes_, phim_nodes_, A_nodes_;
  std::vector<double> slope_p_, slope_m_, slope_A_;
  mutable std::vector<double> scratch_A_, scratch_p_, scratch_m_, flux_;
};

inline FDSolution solve_fd(const ValidatedProblem& p, const FDParams& params) {
  return FDSolver(p, params).run();
}

struct FDComparison {
  double l1_error = 0.0;
  double linf_error_away_from_jumps = 0.0;
};

/// L1 distance between the grid function and u(x/t), plus the max-norm error
/// excluding cells within 10h of any discontinuity ray.
inline FDComparison compare(const FDSolution& fd, const SelfSimilarProfile& prof) {
  if (fd.values.empty() || fd.values.size() != fd.x_centers.size() || !(fd.t_final > 0.0)) {
    throw GridMismatch("compare: finite-difference solution is empty or has t_final <= 0");
  }
  std::vector<double> jump_positions;
  for (const Discontinuity& disc : discontinuities(prof)) {
    jump_positions.push_back(disc.c * fd.t_final);
  }
  FDComparison cmp;
  for (std::size_t i = 0; i < fd.values.size(); ++i) {
    const double exact = eval(prof, fd.x_centers[i] / fd.t_final);
    const double err = std::fabs(fd.values[i] - exact);
    cmp.l1_error += fd.h * err;
    bool near_jump = false;
    for (double xj : jump_positions) {
      if (std::fabs(fd.x_centers[i] - xj) <= 10.0 * fd.h) {
        near_jump = true;
        break;
      }
    }
    if (!near_jump) {
      cmp.linf_error_away_from_jumps = std::max(cmp.linf_error_away_from_jumps, err);
    }
  }
  return cmp;
}

}  // namespace riemann_entropy
