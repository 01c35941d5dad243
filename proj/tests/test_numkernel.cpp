#include <doctest.h>

#include <random>

#include "feynhyper/numkernel.hpp"

using namespace feynhyper;

namespace {

// Relative difference of two reals, floored so exact zeros compare sanely.
Real rel_diff(const Real& a, const Real& b) {
  Real scale = max(max(abs(a), abs(b)), pow10(-300));
  return abs(a - b) / scale;
}

Real lit(const char* s) { return Real(std::string_view(s)); }

}  // namespace

TEST_CASE("precision context policy") {
  auto c50 = PrecisionContext::for_digits(50);
  CHECK(c50.target_digits() == 50);
  CHECK(c50.working_digits() == 70);
  CHECK(c50.max_terms() >= 1000);
  CHECK(c50.max_quad_level() >= 8);

  auto c600 = PrecisionContext::for_digits(600);
  CHECK(c600.working_digits() == 660);

  CHECK_THROWS_AS(PrecisionContext(50, 60, 5000, 10), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionContext(50, 80, 999, 10), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionContext(50, 80, 5000, 7), std::invalid_argument);
  CHECK_NOTHROW(PrecisionContext(50, 70, 1000, 8));

  auto c = c50.with_target(30);
  CHECK(c.target_digits() == 30);
  CHECK(c.working_digits() == 50);
}

TEST_CASE("gamma known values") {
  auto ctx = PrecisionContext::for_digits(50);
  PrecisionScope scope(ctx.working_digits());
  CHECK(rel_diff(gamma(Real(1), ctx).value, Real(1)) < pow10(-65));
  CHECK(rel_diff(gamma(Real(5), ctx).value, Real(24)) < pow10(-65));
  CHECK(rel_diff(gamma(Real(1) / 2, ctx).value, sqrt(pi())) < pow10(-65));
  NumValue g = gamma(lit("3.7"), ctx);
  CHECK(g.abs_err.sign() >= 0);
  CHECK(g.abs_err <= pow10(-ctx.working_digits() + 5) * abs(g.value));
}

TEST_CASE("gamma poles") {
  auto ctx = PrecisionContext::for_digits(30);
  CHECK_THROWS_AS(gamma(Real(0), ctx), PoleError);
  CHECK_THROWS_AS(gamma(Real(-3), ctx), PoleError);
  PrecisionScope scope(ctx.working_digits());
  CHECK_THROWS_AS(gamma(Real(-2) + pow10(-60), ctx), PoleError);
  CHECK_NOTHROW(gamma(Real(-2) + pow10(-20), ctx));
  CHECK(rgamma(Real(-4), ctx).is_zero());
  CHECK(near_nonpositive_integer(Real(0), ctx));
  CHECK_FALSE(near_nonpositive_integer(Real(1), ctx));
  CHECK(near_integer(Real(7), ctx));
}

TEST_CASE("gamma recurrence on random points") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  for (int i = 0; i < 100; ++i) {
    Real z(u(rng));
    Real lhs = gamma(z + 1, ctx).value;
    Real rhs = z * gamma(z, ctx).value;
    CHECK(rel_diff(lhs, rhs) <= pow10(-ctx.working_digits() + 8));
  }
}

TEST_CASE("pochhammer") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  CHECK(pochhammer(Real(7) / 3, 0, ctx).value == Real(1));
  CHECK(pochhammer(Real(2), 3, ctx).value == Real(24));
  CHECK(rel_diff(pochhammer(Real(1) / 2, 2, ctx).value, Real(3) / 4) < pow10(-45));
  // Non-positive integer base: product form terminates.
  CHECK(pochhammer(Real(-2), 3, ctx).value == Real(0));
  CHECK(pochhammer(Real(-2), 2, ctx).value == Real(2));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 30; ++i) {
    Real a(u(rng));
    for (long k = 0; k < 12; ++k) {
      Real next = pochhammer(a, k + 1, ctx).value;
      Real step = pochhammer(a, k, ctx).value * (a + k);
      CHECK(next == step);
    }
  }
}

TEST_CASE("kallen") {
  PrecisionScope scope(60);
  Real y = lit("0.37");
  CHECK(kallen(Real(1), Real(0), y) == (1 - y) * (1 - y));
  CHECK(kallen(Real(1), Real(1), Real(1)) == Real(-3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Real a(u(rng)), b(u(rng)), c(u(rng));
    CHECK(kallen(a, b, c) == kallen(a, c, b));
    Real direct = (1 - b - c) * (1 - b - c) - 4 * b * c;
    CHECK(kallen(Real(1), b, c) == direct);
  }
}

TEST_CASE("sum_series examples and error soundness") {
  auto ctx = PrecisionContext::for_digits(50);
  PrecisionScope scope(ctx.working_digits());
  Real half = Real(1) / 2;
  SeriesResult geo = sum_series([&](long n) { return pow(half, n); }, ctx);
  CHECK(geo.converged);
  CHECK(abs(geo.value.value - 2) <= 10 * geo.value.abs_err + pow10(-ctx.working_digits()));
  CHECK(abs(geo.value.value - 2) < pow10(-60));

  Real t(1);
  SeriesResult e = sum_series(
      [&](long n) {
        if (n > 0) t = t / n;
        return t;
      },
      ctx);
  CHECK(e.converged);
  CHECK(rel_diff(e.value.value, exp(Real(1))) < pow10(-60));
  CHECK(abs(e.value.value - exp(Real(1))) <= 10 * e.value.abs_err + pow10(-66));

  SeriesResult bad = sum_series([](long) { return Real(1); }, ctx);
  CHECK_FALSE(bad.converged);
  CHECK(bad.terms_used == ctx.max_terms());
  CHECK_THROWS_AS(sum_series_checked([](long) { return Real(1); }, ctx, "ones"), NonConvergence);
}

TEST_CASE("double series over shells") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  // Σ x^k y^l = 1/((1-x)(1-y)).
  Real x = lit("0.3"), y = lit("-0.6");
  DoubleSeriesSteps steps{Real(1), [&](long, long, const Real& t) { return t * y; },
                          [&](long, const Real& t) { return t * x; }};
  SeriesResult r = sum_double_series(steps, ctx);
  CHECK(r.converged);
  Real truth = 1 / ((1 - x) * (1 - y));
  CHECK(rel_diff(r.value.value, truth) < pow10(-50));
  CHECK(abs(r.value.value - truth) <= 10 * r.value.abs_err + pow10(-58));
}

TEST_CASE("quad_de examples") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  NumValue one = quad_de([](const Real&) { return Real(1); }, Real(0), Real(1), ctx);
  CHECK(rel_diff(one.value, Real(1)) < pow10(-40));

  NumValue two = quad_de([](const Real& x) { return 1 / sqrt(x); }, Real(0), Real(1), ctx);
  CHECK(rel_diff(two.value, Real(2)) < pow10(-40));

  // Beta(0.3, 0.6) via endpoint-aware integrand; error bound soundness.
  Real a = lit("0.3"), b = lit("0.6");
  NumValue beta = quad_de_endpoint(
      [&](const QuadNode& n) { return pow(n.from_lower, a - 1) * pow(n.from_upper, b - 1); },
      Real(0), Real(1), ctx);
  Real truth = tgamma_raw(a) * tgamma_raw(b) / tgamma_raw(a + b);
  CHECK(rel_diff(beta.value, truth) < pow10(-40));
  CHECK(abs(beta.value - truth) <= 10 * beta.abs_err + pow10(-40) * truth);
}

TEST_CASE("quad_de one-fold F1 matches the brute-force double series") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  const Real d(5), x = Real(1) / 4, y = Real(1) / 3;
  const Real e = d / 2 - 2;
  NumValue integral = quad_de(
      [&](const Real& u) { return pow((1 - u) * (1 - y * u), e) / (1 - x * u); }, Real(0),
      Real(1), ctx);
  // Frozen oracle: F1(1,1,-1/2;5/2;1/4,1/3) from an independent double-series sum.
  const Real f1 = lit("1.03473112774831568613026167018418951803346803479541440047723");
  CHECK(rel_diff(integral.value, 2 / (d - 2) * f1) < pow10(-40));
}

TEST_CASE("quad_de affine invariance") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  auto f = [](const Real& t) { return exp(-t) * pow(t, Real(1) / 3); };
  NumValue base = quad_de(f, Real(0), Real(2), ctx);
  // t = 2(s - lo)/(hi - lo) maps (lo, hi) onto (0, 2).
  Real lo = lit("-3.5"), hi = lit("7.25");
  Real jac = 2 / (hi - lo);
  NumValue moved = quad_de_endpoint(
      [&](const QuadNode& n) { return f(jac * n.from_lower) * jac; }, lo, hi, ctx);
  CHECK(rel_diff(base.value, moved.value) <= pow10(-ctx.target_digits()));
}

TEST_CASE("quad_de failure modes") {
  auto ctx = PrecisionContext::for_digits(30);
  CHECK_THROWS_AS(
      quad_de([](const Real& x) { return log(x - Real(1) / 2); }, Real(0), Real(1), ctx),
      DomainError);
  CHECK_THROWS_AS(quad_de([](const Real&) { return Real(1); }, Real(1), Real(0), ctx),
                  DomainError);
  // A jump in the middle defeats tanh-sinh refinement.
  CHECK_THROWS_AS(quad_de([](const Real& x) { return x < Real(1) / 3 ? Real(0) : Real(1); },
                          Real(0), Real(1), ctx),
                  QuadFailure);
}

TEST_CASE("NumValue error propagation") {
  PrecisionScope scope(60);
  NumValue a(Real(3), Real(1) / 100);
  NumValue b(Real(-2), Real(1) / 1000);
  NumValue p = a * b;
  CHECK(p.value == Real(-6));
  CHECK(p.abs_err >= 3 * b.abs_err + 2 * a.abs_err + a.abs_err * b.abs_err);
  NumValue s = a + b;
  CHECK(s.abs_err >= a.abs_err + b.abs_err);
  NumValue q = a / b;
  // Worst case of the true quotient stays inside the bound.
  Real worst = abs((a.value + a.abs_err) / (b.value + b.abs_err) - q.value);
  CHECK(q.abs_err >= worst);
  CHECK(NumValue(Real(0), Real(0)).rel_err().is_zero());
}
