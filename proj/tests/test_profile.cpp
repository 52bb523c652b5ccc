#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "riemann_entropy/optimizer.hpp"
#include "riemann_entropy/profile.hpp"
#include "riemann_entropy/stats.hpp"
#include "support/oracles.hpp"

using namespace riemann_entropy;
using test_oracles::Rng;

namespace {
const double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("linear heat profile is the plain cumulative", "[profile]") {
  const ValidatedProblem p = validate({{0.0, 1.0}, {0.0}, {1.0}});
  const SelfSimilarProfile prof = build_profile(p, SpeedVector{});
  REQUIRE(prof.pieces.size() == 1);
  CHECK(eval(prof, 0.0) == Catch::Approx(0.5).margin(1e-15));
  for (double z : {-3.0, -1.0, -0.2, 0.7, 2.5}) {
    CHECK(eval(prof, z) == Catch::Approx(stats::normal_cdf(z)).margin(1e-15));
  }
  CHECK(eval(prof, -inf) == 0.0);
  CHECK(eval(prof, inf) == 1.0);
  CHECK(discontinuities(prof).empty());
}

TEST_CASE("pure step profile and its catalog", "[profile]") {
  const ValidatedProblem p = validate({{0.0, 1.0}, {3.0}, {0.0}});
  const SelfSimilarProfile prof = build_profile(p, SpeedVector{{3.0}});
  CHECK(eval(prof, 2.9) == 0.0);
  CHECK(eval(prof, 3.1) == 1.0);
  CHECK(eval(prof, 3.0) == 1.0);  // right-continuous at the jump

  const auto jumps = discontinuities(prof);
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].c == 3.0);
  CHECK(jumps[0].u_minus == 0.0);
  CHECK(jumps[0].u_plus == 1.0);
  CHECK(jumps[0].Aflux_minus == 0.0);
  CHECK(jumps[0].Aflux_plus == 0.0);
  CHECK(jumps[0].kind == Discontinuity::Kind::strong);
}

TEST_CASE("merged coordinates leave an empty middle piece", "[profile]") {
  const ValidatedProblem p = validate({{0.0, 0.5, 1.0}, {1.0, -1.0}, {0.0, 0.0}});
  const SelfSimilarProfile prof = build_profile(p, SpeedVector{{0.0, 0.0}});
  REQUIRE(prof.pieces.size() == 3);
  CHECK(eval(prof, -0.1) == 0.0);
  CHECK(eval(prof, 0.1) == 1.0);
  CHECK(eval(prof, 0.0) == 1.0);
  const auto jumps = discontinuities(prof);
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].u_minus == 0.0);
  CHECK(jumps[0].u_plus == 1.0);
}

TEST_CASE("build rejects closed diffusive gaps", "[profile]") {
  const ValidatedProblem p =
      validate({{0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  CHECK_THROWS_AS(build_profile(p, SpeedVector{{0.2, 0.2}}), DegenerateGap);
  CHECK_THROWS_AS(build_profile(p, SpeedVector{{0.2}}), DimensionMismatch);
}

TEST_CASE("weak discontinuity keeps u (and u' when a matches) continuous", "[profile]") {
  // symmetric: minimizer at 0, u continuous with value u_1 = 1
  const ValidatedProblem sym = validate({{0.0, 1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0}});
  const SelfSimilarProfile prof = build_profile(sym, SpeedVector{{0.0}});
  CHECK(eval(prof, 0.0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(eval(prof, -1e-9) == Catch::Approx(1.0).margin(1e-8));
  CHECK(eval(prof, 1e-9) == Catch::Approx(1.0).margin(1e-8));

  // equal diffusions at the certified minimizer: derivative is continuous too
  const ValidatedProblem skew = validate({{0.0, 1.0, 2.0}, {0.5, -0.3}, {0.7, 0.7}});
  const MinimizeResult r = minimize(skew);
  const SelfSimilarProfile sp = build_profile(skew, r.xi);
  const double c = r.xi.xi[0];
  CHECK(eval_derivative(sp, std::nextafter(c, -inf)) ==
        Catch::Approx(eval_derivative(sp, c)).epsilon(1e-6));
}

TEST_CASE("interior pieces satisfy the self-similar ODE", "[profile]") {
  // (v_k - xi) u' = a_k^2 u'' inside every diffusive piece; u'' recomputed
  // from quadrature-oracle quantities so the closed forms are checked
  Rng rng(501);
  for (int rep = 0; rep < 15; ++rep) {
    const ValidatedProblem p = test_oracles::random_problem(rng, rng.uniform_int(1, 5));
    const SpeedVector s = test_oracles::random_feasible_point(p, rng, 0.4, 0.3);
    const SelfSimilarProfile prof = build_profile(p, s);
    for (const ProfilePiece& piece : prof.pieces) {
      if (!piece.diffusive) continue;
      const double lo = std::max(piece.xi_lo, piece.v - 6.0 * piece.a);
      const double hi = std::min(piece.xi_hi, piece.v + 6.0 * piece.a);
      if (!(hi > lo)) continue;
      for (int i = 1; i < 8; ++i) {
        const double xi = lo + (hi - lo) * i / 8.0;
        const double z = (xi - piece.v) / piece.a;
        const double gap = std::exp(test_oracles::oracle_log_gap(
            std::max(piece.z_lo, -40.0), std::min(piece.z_hi, 40.0)));
        const double du = piece.u_hi - piece.u_lo;
        const double upp_oracle =
            -z * du * test_oracles::oracle_pdf(z) / (piece.a * piece.a * gap);
        const double up = eval_derivative(prof, xi);
        const double residual = (piece.v - xi) * up - piece.a * piece.a * upp_oracle;
        INFO("piece v=" << piece.v << " a=" << piece.a << " xi=" << xi);
        CHECK(std::fabs(residual) <= 1e-9 * (1.0 + std::fabs(up)));
      }
    }
  }
}

TEST_CASE("evaluation is monotone with the data limits", "[profile]") {
  Rng rng(502);
  for (int rep = 0; rep < 25; ++rep) {
    const ValidatedProblem p = test_oracles::random_problem(rng, rng.uniform_int(1, 6));
    const SpeedVector s = test_oracles::random_feasible_point(p, rng);
    const SelfSimilarProfile prof = build_profile(p, s);
    CHECK(eval(prof, -inf) == p.alpha());
    CHECK(eval(prof, inf) == p.beta());
    double prev = p.alpha();
    for (int i = 0; i <= 400; ++i) {
      const double xi = -6.0 + 12.0 * i / 400.0;
      const double u = eval(prof, xi);
      CHECK(u >= prev);
      CHECK(u >= p.alpha());
      CHECK(u <= p.beta());
      prev = u;
    }
  }
}

TEST_CASE("sampling brackets jumps and stays sorted", "[profile]") {
  const ValidatedProblem lin = validate({{0.0, 1.0}, {0.0}, {1.0}});
  const SelfSimilarProfile lprof = build_profile(lin, SpeedVector{});
  const auto rows = sample(lprof, -4.0, 4.0, 9);
  REQUIRE(rows.size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(rows[i].u == Catch::Approx(stats::normal_cdf(-4.0 + i)).margin(1e-15));
  }

  const ValidatedProblem step = validate({{0.0, 1.0}, {3.0}, {0.0}});
  const SelfSimilarProfile sprof = build_profile(step, SpeedVector{{3.0}});
  const auto srows = sample(sprof, 2.0, 4.0, 11);
  bool saw_minus = false, saw_plus = false;
  double prev_u = -1.0;
  for (const SampleRow& r : srows) {
    if (r.xi == 3.0 && r.side == SampleRow::Side::minus && r.u == 0.0) saw_minus = true;
    if (r.xi == 3.0 && r.side == SampleRow::Side::plus && r.u == 1.0) saw_plus = true;
    CHECK(r.u >= prev_u);
    prev_u = r.u;
  }
  CHECK(saw_minus);
  CHECK(saw_plus);

  CHECK_THROWS_AS(sample(sprof, 4.0, 2.0, 5), BadWindow);
  CHECK_THROWS_AS(sample(sprof, 2.0, 4.0, 1), BadWindow);
}
