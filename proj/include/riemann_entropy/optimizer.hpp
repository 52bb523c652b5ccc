#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riemann_entropy/entropy.hpp"
#include "riemann_entropy/errors.hpp"
#include "riemann_entropy/model.hpp"
#include "riemann_entropy/tridiagonal.hpp"

// Minimization of the entropy over the ordered cone.  The pure
// conservation-law case (a == 0) is an exact isotonic regression, solved by
// the pool-adjacent-violators algorithm; the general case runs projected
// gradient descent for globalization and an active-set Newton method on the
// merged-group variables for fast tail convergence.  Optimality is certified
// by the grouped first-order conditions: within every maximal family of
// coinciding coordinates the gradient components must sum to zero and every
// proper suffix sum must be nonnegative.

namespace riemann_entropy {

// Maximal run xi_k = ... = xi_l of coinciding coordinates (1-based, k = l allowed).
struct Group {
  int k, l;
  double value;
};

struct GroupStructure {
  std::vector<Group> groups;
};

struct KKTReport {
  GroupStructure groups;
  std::vector<double> group_sums;               // per group: sum_i dE/dxi_i
  std::vector<std::vector<double>> suffix_sums;  // per group, j = k+1..l
  double max_violation = 0.0;
  double tol = 0.0;
  bool optimal = true;
};

struct MinimizeOptions {
  double tol = 1e-10;   // bound on the KKT max violation
  int max_iter = 500;
  std::optional<SpeedVector> initial;
  std::function<void(int iter, double energy)> on_iteration;  // descent observer
};

struct MinimizeResult {
  SpeedVector xi;
  KKTReport kkt;
  int iterations = 0;
};

class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(const std::string& msg, MinimizeResult best_so_far)
      : Error(msg), best(std::move(best_so_far)) {}
  MinimizeResult best;
};

/// Exact minimizer of (1/2) sum w_i (x_i - t_i)^2 over x_1 <= ... <= x_n.
/// Pooled blocks take the weighted mean of their targets.
inline std::vector<double> pava(std::span<const double> weights, std::span<const double> targets) {
  const std::size_t n = weights.size();
  if (n == 0 || targets.size() != n) {
    throw LengthMismatch("pava: weights and targets must have equal nonzero length");
  }
  struct Block {
    double w, wt;
    std::size_t count;
  };
  std::vector<Block> stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) {
      throw NonPositiveWeight("pava: weight " + std::to_string(i) + " must be > 0");
    }
    Block b{weights[i], weights[i] * targets[i], 1};
    // pool while the previous block's mean exceeds this one's; compare the
    // divided means themselves so the emitted values are monotone to the ulp
    while (!stack.empty() && stack.back().wt / stack.back().w > b.wt / b.w) {
      b.w += stack.back().w;
      b.wt += stack.back().wt;
      b.count += stack.back().count;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  std::vector<double> out;
  out.reserve(n);
  for (const Block& b : stack) {
    const double value = b.wt / b.w;
    out.insert(out.end(), b.count, value);
  }
  return out;
}

/// Grouped first-order optimality check at a feasible point: per maximal
/// group of exactly coinciding coordinates, |sum of partials| and the
/// negative part of every suffix sum contribute to max_violation.
inline KKTReport kkt_check(const ValidatedProblem& p, const SpeedVector& s, double tol) {
  detail::check_dimension(p, s, "kkt_check");
  if (!in_cone(p, s)) throw InfeasiblePoint("kkt_check: point is not in the ordered cone");
  KKTReport rep;
  rep.tol = tol;
  const int d = p.d();
  if (d == 0) return rep;

  const std::vector<double> g = entropy_gradient(p, s);
  int i = 0;
  while (i < d) {
    int j = i;
    while (j + 1 < d && s.xi[j + 1] == s.xi[j]) ++j;
    rep.groups.groups.push_back(Group{i + 1, j + 1, s.xi[i]});
    double total = 0.0;
    std::vector<double> suffixes(static_cast<std::size_t>(j - i), 0.0);
    for (int t = j; t >= i; --t) {
      total += g[t];
      if (t > i) suffixes[static_cast<std::size_t>(t - i - 1)] = total;
    }
    rep.group_sums.push_back(total);
    rep.suffix_sums.push_back(suffixes);
    rep.max_violation = std::max(rep.max_violation, std::fabs(total));
    for (double sfx : suffixes) rep.max_violation = std::max(rep.max_violation, -sfx);
    i = j + 1;
  }
  rep.optimal = rep.max_violation <= tol;
  return rep;
}

/// Feasible, strictly interior starting point: isotonic projection of the
/// piece velocities with weights du, then every required gap opened to at
/// least 0.1 a_k by shifting the prefix down and the suffix up.
inline SpeedVector initial_point(const ValidatedProblem& p) {
  const int d = p.d();
  SpeedVector s;
  if (d == 0) return s;
  std::vector<double> w(static_cast<std::size_t>(d)), t(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    w[j] = p.du(j);
    t[j] = p.v()[j];
  }
  s.xi = pava(w, t);
  for (int j = 1; j <= d - 1; ++j) {
    const double need = 0.1 * p.a()[j];
    if (!(need > 0.0)) continue;
    const double deficit = need - (s.xi[j] - s.xi[j - 1]);
    if (deficit > 0.0) {
      for (int i = 0; i < j; ++i) s.xi[i] -= 0.5 * deficit;
      for (int i = j; i < d; ++i) s.xi[i] += 0.5 * deficit;
    }
  }
  return s;
}

namespace detail {

class ConeMinimizer {
 public:
  ConeMinimizer(const ValidatedProblem& p, MinimizeOptions opts)
      : p_(p), opts_(std::move(opts)) {}

  MinimizeResult run() {
    const int d = p_.d();
    if (d == 0) {
      SpeedVector empty;
      return MinimizeResult{empty, kkt_check(p_, empty, opts_.tol), 0};
    }

    SpeedVector x = opts_.initial ? *opts_.initial : initial_point(p_);
    if (!in_cone(p_, x)) {
      throw InfeasiblePoint("minimize: supplied initial point is not in the cone");
    }
    adopt(x);
    energy_ = entropy_value(p_, expand());
    notify();

    projected_gradient_phase();
    if (newton_phase(/*allow_splits=*/true)) {
      if (cp0_sweep()) snap_and_polish();
    }

    SpeedVector result = expand();
    KKTReport kkt = kkt_check(p_, result, opts_.tol);
    if (!kkt.optimal) {
      throw MaxIterationsExceeded(
          "minimize: iteration budget exhausted before reaching tolerance",
          MinimizeResult{result, kkt, iter_});
    }
    return MinimizeResult{std::move(result), std::move(kkt), iter_};
  }

 private:
  struct Block {
    int lo, hi;  // 0-based inclusive coordinate range
    double value;
  };

  const ValidatedProblem& p_;
  MinimizeOptions opts_;
  std::vector<Block> blocks_;
  double energy_ = 0.0;
  int iter_ = 0;

  void notify() const {
    if (opts_.on_iteration) opts_.on_iteration(iter_, energy_);
  }

  bool budget_left() const { return iter_ < opts_.max_iter; }

  void adopt(const SpeedVector& x) {
    blocks_.clear();
    int i = 0;
    const int d = x.size();
    while (i < d) {
      int j = i;
      while (j + 1 < d && x.xi[j + 1] == x.xi[j]) ++j;
      blocks_.push_back(Block{i, j, x.xi[i]});
      i = j + 1;
    }
  }

  SpeedVector expand() const {
    SpeedVector s;
    s.xi.resize(static_cast<std::size_t>(p_.d()));
    for (const Block& b : blocks_) {
      for (int i = b.lo; i <= b.hi; ++i) s.xi[static_cast<std::size_t>(i)] = b.value;
    }
    return s;
  }

  // diffusion of the piece separating coordinate i-1 from i (0-based)
  double gap_diffusion(int i) const { return p_.a()[i]; }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  // ---- projected gradient with PAVA projection -----------------------------

  // one backtracking projected-gradient step; also the fallback when a
  // Newton step cannot make progress on the current group structure
  bool pg_step() {
    const SpeedVector x = expand();
    const std::vector<double> g = entropy_gradient(p_, x);
    std::vector<double> ones(x.xi.size(), 1.0);
    double s = 1.0;
    {
      const SymTridiagonal h = entropy_hessian(p_, x);
      double hmax = 0.0;
      for (double v : h.diag) hmax = std::max(hmax, std::fabs(v));
      if (hmax > 0.0) s = 1.0 / (1.0 + hmax);
    }
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> z(x.xi);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] -= s * g[i];
      SpeedVector y;
      y.xi = pava(ones, z);
      std::vector<double> dxi(y.xi);
      for (std::size_t i = 0; i < dxi.size(); ++i) dxi[i] -= x.xi[i];
      const double pred = dot(g, dxi);
      const double ey = entropy_value(p_, y);
      if (pred < 0.0 && ey <= energy_ + 1e-4 * pred) {
        adopt(y);
        energy_ = ey;
        ++iter_;
        notify();
        return true;
      }
      s *= 0.5;
    }
    return false;
  }

  void projected_gradient_phase() {
    for (int it = 0; it < 100 && budget_left(); ++it) {
      const double before = energy_;
      if (!pg_step()) break;
      if (before - energy_ <= 1e-12 * (1.0 + std::fabs(energy_))) break;
    }
  }

  // ---- phase 2: active-set Newton on group values --------------------------

  std::vector<double> block_gradient(const std::vector<double>& g) const {
    std::vector<double> gb(blocks_.size(), 0.0);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (int i = blocks_[b].lo; i <= blocks_[b].hi; ++i) gb[b] += g[i];
    }
    return gb;
  }

  SymTridiagonal block_hessian(const SymTridiagonal& h) const {
    SymTridiagonal hb;
    hb.diag.assign(blocks_.size(), 0.0);
    hb.off.assign(blocks_.size() > 1 ? blocks_.size() - 1 : 0, 0.0);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (int i = blocks_[b].lo; i <= blocks_[b].hi; ++i) {
        hb.diag[b] += h.diag[i];
        if (i > blocks_[b].lo) hb.diag[b] += 2.0 * h.off[i - 1];
      }
      if (b + 1 < blocks_.size()) hb.off[b] = h.off[blocks_[b].hi];
    }
    return hb;
  }

  // one Newton (or fallback projected-gradient) step; returns false when no
  // progress is possible
  bool newton_step(const std::vector<double>& gb) {
    const std::size_t nb = blocks_.size();
    const SymTridiagonal hb = block_hessian(entropy_hessian(p_, expand()));
    std::vector<double> dir(nb, 0.0);
    const auto fac = TridiagonalLDLT::factor(hb);
    if (fac) {
      std::vector<double> rhs(nb);
      for (std::size_t b = 0; b < nb; ++b) rhs[b] = -gb[b];
      dir = fac->solve(std::move(rhs));
    }
    double pred = fac ? dot(gb, dir) : 0.0;
    if (!fac || !(pred < 0.0)) {
      for (std::size_t b = 0; b < nb; ++b) dir[b] = -gb[b];
      pred = dot(gb, dir);
      if (!(pred < 0.0)) return false;
    }

    // largest admissible step; record whether the binding constraint is a
    // mergeable (zero-diffusion) group boundary
    double tmax = 1.0;
    int merge_at = -1;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      const double rel = dir[b] - dir[b + 1];
      if (!(rel > 0.0)) continue;
      const double tc = (blocks_[b + 1].value - blocks_[b].value) / rel;
      if (gap_diffusion(blocks_[b].hi + 1) == 0.0) {
        if (tc <= tmax) {
          tmax = tc;
          merge_at = static_cast<int>(b);
        }
      } else {
        const double tl = 0.9999 * tc;
        if (tl < tmax) {
          tmax = tl;
          merge_at = -1;
        }
      }
    }

    double t = tmax;
    while (t > 1e-14) {
      std::vector<Block> trial = blocks_;
      for (std::size_t b = 0; b < nb; ++b) trial[b].value += t * dir[b];
      if (merge_at >= 0 && t == tmax) trial[merge_at + 1].value = trial[merge_at].value;
      // tied boundary hits can invert neighbors by one ulp; equalize across
      // zero-diffusion boundaries (a > 0 inversions leave E = +inf and are
      // rejected by the line search)
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        if (trial[b + 1].value < trial[b].value &&
            gap_diffusion(trial[b].hi + 1) == 0.0) {
          trial[b + 1].value = trial[b].value;
        }
      }
      SpeedVector y;
      y.xi.resize(static_cast<std::size_t>(p_.d()));
      for (const Block& b : trial) {
        for (int i = b.lo; i <= b.hi; ++i) y.xi[i] = b.value;
      }
      const double ey = entropy_value(p_, y);
      if (ey <= energy_ + 1e-4 * t * pred) {
        blocks_ = std::move(trial);
        merge_equal_blocks();
        energy_ = ey;
        ++iter_;
        notify();
        return true;
      }
      t *= 0.5;
    }
    return false;
  }

  void merge_equal_blocks() {
    for (std::size_t b = 0; b + 1 < blocks_.size();) {
      if (blocks_[b].value == blocks_[b + 1].value &&
          gap_diffusion(blocks_[b].hi + 1) == 0.0) {
        blocks_[b].hi = blocks_[b + 1].hi;
        blocks_.erase(blocks_.begin() + b + 1);
      } else {
        ++b;
      }
    }
  }

  // drive the current group structure to stationarity; split groups whose
  // suffix sums certify a feasible descent direction
  bool newton_phase(bool allow_splits) {
    const double settle = 0.1 * opts_.tol;
    while (budget_left()) {
      const std::vector<double> g = entropy_gradient(p_, expand());
      const std::vector<double> gb = block_gradient(g);
      double gnorm = 0.0;
      for (double v : gb) gnorm = std::max(gnorm, std::fabs(v));
      if (gnorm <= settle) {
        if (!allow_splits) return true;
        int split_block = -1, split_at = -1;
        double worst = -0.25 * opts_.tol;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
          double sfx = 0.0;
          for (int i = blocks_[b].hi; i > blocks_[b].lo; --i) {
            sfx += g[i];
            if (sfx < worst) {
              worst = sfx;
              split_block = static_cast<int>(b);
              split_at = i;
            }
          }
        }
        if (split_block < 0) return true;
        Block right = blocks_[split_block];
        right.lo = split_at;
        blocks_[split_block].hi = split_at - 1;
        blocks_.insert(blocks_.begin() + split_block + 1, right);
        continue;
      }
      if (!newton_step(gb) && !pg_step()) return gnorm <= opts_.tol;
    }
    return false;
  }

  // An isolated coordinate with positive diffusion on its left piece and zero
  // on its right piece can never be stationary (its partial derivative is
  // strictly negative), so the exact minimizer always merges it rightwards.
  // When that pull is below the solver tolerance the iteration stalls with
  // the coordinate detached; merge it explicitly.  Merging rightwards only
  // widens the left gap, so it never increases the entropy materially.
  bool cp0_sweep() {
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t b = 0; b + 1 < blocks_.size(); ++b) {
        const Block& blk = blocks_[b];
        if (blk.lo != blk.hi) continue;
        if (!(p_.a()[blk.lo] > 0.0) || p_.a_ext(blk.lo + 1) != 0.0) continue;
        blocks_[b].value = blocks_[b + 1].value;
        blocks_[b].hi = blocks_[b + 1].hi;
        blocks_.erase(blocks_.begin() + b + 1);
        energy_ = entropy_value(p_, expand());
        merged = true;
        if (!newton_phase(/*allow_splits=*/false)) return false;
        break;
      }
    }
    return true;
  }

  // merge group values that coincide to rounding across zero-diffusion
  // boundaries, then let Newton re-settle the merged values
  bool snap_and_polish() {
    bool snapped = false;
    for (std::size_t b = 0; b + 1 < blocks_.size();) {
      const double v0 = blocks_[b].value, v1 = blocks_[b + 1].value;
      const double tol = 1e-9 * (1.0 + std::max(std::fabs(v0), std::fabs(v1)));
      if (gap_diffusion(blocks_[b].hi + 1) == 0.0 && std::fabs(v1 - v0) <= tol) {
        double w = 0.0, wv = 0.0;
        for (int i = blocks_[b].lo; i <= blocks_[b + 1].hi; ++i) {
          w += p_.du(i);
          wv += p_.du(i) * (i <= blocks_[b].hi ? v0 : v1);
        }
        blocks_[b].value = wv / w;
        blocks_[b].hi = blocks_[b + 1].hi;
        blocks_.erase(blocks_.begin() + b + 1);
        snapped = true;
      } else {
        ++b;
      }
    }
    if (snapped) {
      energy_ = entropy_value(p_, expand());
      return newton_phase(/*allow_splits=*/false);
    }
    return true;
  }
};

}  // namespace detail

/// Minimize the entropy over the cone.  The minimizer exists and is unique;
/// the returned KKT report certifies max_violation <= options.tol.  Throws
/// MaxIterationsExceeded (with the best iterate attached) when the budget is
/// exhausted first.
inline MinimizeResult minimize(const ValidatedProblem& p, MinimizeOptions options = {}) {
  return detail::ConeMinimizer(p, std::move(options)).run();
}

}  // namespace riemann_entropy
