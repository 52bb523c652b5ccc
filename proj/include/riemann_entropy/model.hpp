#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "riemann_entropy/errors.hpp"

namespace riemann_entropy {

// Riemann problem data for u_t + v(u) u_x - t (a^2(u) u_x)_x = 0 with
// piecewise constant coefficients: v(u) = v[k], a(u) = a[k] on (u[k], u[k+1]).
struct PiecewiseProblem {
  std::vector<double> u;  // n+1 strictly increasing state breakpoints
  std::vector<double> v;  // n interval velocities
  std::vector<double> a;  // n interval diffusions, each >= 0
};

// A PiecewiseProblem that passed validate(), with the number d of interior
// discontinuity speeds attached.  Immutable; safe to share across threads.
class ValidatedProblem {
 public:
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& v() const { return v_; }
  const std::vector<double>& a() const { return a_; }

  int n() const { return static_cast<int>(v_.size()); }
  int d() const { return d_; }

  double alpha() const { return u_.front(); }
  double beta() const { return u_.back(); }
  double du(int k) const { return u_[static_cast<std::size_t>(k) + 1] - u_[k]; }

  // diffusion of piece k under the convention a_n = 0 (piece d may be piece n)
  double a_ext(int k) const { return k < n() ? a_[k] : 0.0; }

 private:
  friend ValidatedProblem validate(PiecewiseProblem problem);
  ValidatedProblem(std::vector<double> u, std::vector<double> v, std::vector<double> a, int d)
      : u_(std::move(u)), v_(std::move(v)), a_(std::move(a)), d_(d) {}

  std::vector<double> u_, v_, a_;
  int d_;
};

inline ValidatedProblem validate(PiecewiseProblem problem) {
  const std::size_t n = problem.v.size();
  if (n < 1 || problem.u.size() != n + 1 || problem.a.size() != n) {
    throw LengthMismatch("validate: need |u| = n+1, |v| = n, |a| = n with n >= 1 (got |u|=" +
                         std::to_string(problem.u.size()) + ", |v|=" + std::to_string(n) +
                         ", |a|=" + std::to_string(problem.a.size()) + ")");
  }
  for (std::size_t k = 0; k + 1 < problem.u.size(); ++k) {
    if (!(problem.u[k] < problem.u[k + 1])) {
      throw NonIncreasingBreakpoints("validate: u[" + std::to_string(k + 1) +
                                     "] must exceed u[" + std::to_string(k) + "]");
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(problem.a[k] >= 0.0)) {
      throw NegativeDiffusion("validate: a[" + std::to_string(k) + "] must be >= 0");
    }
  }
  const int d = problem.a[n - 1] > 0.0 ? static_cast<int>(n) - 1 : static_cast<int>(n);
  return ValidatedProblem(std::move(problem.u), std::move(problem.v), std::move(problem.a), d);
}

// The induced fluxes: phi piecewise linear with slopes v_k, A piecewise linear
// nondecreasing with slopes a_k^2, both anchored to 0 at u = alpha.
class FluxFunctions {
 public:
  explicit FluxFunctions(const ValidatedProblem& p)
      : nodes_(p.u()), phi_nodes_(p.u().size(), 0.0), A_nodes_(p.u().size(), 0.0),
        v_(p.v()), a2_(p.a().size(), 0.0) {
    for (std::size_t k = 0; k < v_.size(); ++k) {
      const double w = nodes_[k + 1] - nodes_[k];
      a2_[k] = p.a()[k] * p.a()[k];
      phi_nodes_[k + 1] = phi_nodes_[k] + v_[k] * w;
      A_nodes_[k + 1] = A_nodes_[k] + a2_[k] * w;
    }
  }

  double phi(double x) const { return eval(phi_nodes_, v_, x); }
  double A(double x) const { return eval(A_nodes_, a2_, x); }

 private:
  double eval(const std::vector<double>& values, const std::vector<double>& slopes,
              double x) const {
    if (!(x >= nodes_.front()) || !(x <= nodes_.back())) {
      throw OutOfRange("flux evaluation: state outside [alpha, beta]");
    }
    // interval index with the convention that x = beta belongs to the last one
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= slopes.size()) k = slopes.size() - 1;
    return values[k] + slopes[k] * (x - nodes_[k]);
  }

  std::vector<double> nodes_, phi_nodes_, A_nodes_, v_, a2_;
};

inline double phi_eval(const FluxFunctions& fl, double x) { return fl.phi(x); }
inline double A_eval(const FluxFunctions& fl, double x) { return fl.A(x); }

}  // namespace riemann_entropy
