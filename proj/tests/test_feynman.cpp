#include <doctest.h>

#include <random>

#include "feynhyper/feynman.hpp"

using namespace feynhyper;

namespace {

Real lit(const char* s) { return Real(std::string_view(s)); }

Real rel_diff(const Real& a, const Real& b) {
  Real scale = max(max(abs(a), abs(b)), pow10(-300));
  return abs(a - b) / scale;
}

bool agrees(const Real& a, const Real& b, int digits) { return rel_diff(a, b) <= pow10(-digits); }

BubbleKinematics bubble(const char* nu1, const char* nu2, const char* d, const char* m1sq,
                        const char* m2sq, const char* s12) {
  return {lit(nu1), lit(nu2), lit(d), lit(m1sq), lit(m2sq), lit(s12)};
}

VertexKinematics vertex(const char* d, const char* msq, const char* s12, const char* s13) {
  return {lit(msq), lit(s12), lit(s13), lit(d)};
}

}  // namespace

TEST_CASE("bubble roots") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  auto [a, b] = bubble_xpm(bubble("1", "1", "3", "0", "1", "0"), ctx);
  CHECK(a.is_zero());
  CHECK(b == Real(1));

  auto k = bubble("1", "1", "3", "2", "2", "-1.4");
  auto [xm, xp] = bubble_xpm(k, ctx);
  Real x = k.s12 / k.m2sq;
  CHECK(xm <= xp);
  CHECK(agrees(xm + xp, x, 60));
  CHECK(agrees(xm * xp, x, 60));
  CHECK_THROWS_AS(bubble_xpm(bubble("1", "1", "3", "1", "1", "1"), ctx), DomainError);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> um(0.05, 3.0), us(-3.0, 0.3);
  for (int i = 0; i < 20; ++i) {
    BubbleKinematics r{Real(1), Real(1), Real(3), Real(um(rng)), Real(um(rng)), Real(us(rng))};
    if (kallen(Real(1), r.s12 / r.m2sq, r.m1sq / r.m2sq).sign() < 0) continue;
    auto [m, p] = bubble_xpm(r, ctx);
    Real worst(0);
    for (int j = 0; j <= 20; ++j) {
      Real u = Real(j) / 20;
      Real P = r.s12 * u * u + u * (r.m1sq - r.m2sq - r.s12) + r.m2sq;
      worst = max(worst, abs(r.m2sq * (1 - m * u) * (1 - p * u) - P));
    }
    CHECK(worst <= pow10(-ctx.working_digits() + 10) * r.m2sq);
  }
}

TEST_CASE("bubble validation") {
  auto ctx = PrecisionContext::for_digits(30);
  CHECK_THROWS_AS(validate(bubble("1", "1", "6.5", "1", "1", "0"), ctx), DomainError);
  CHECK_THROWS_AS(validate(bubble("1", "1", "3", "1", "1", "4.5"), ctx), DomainError);
  CHECK_THROWS_AS(validate(bubble("1", "1", "4", "1", "1", "0"), ctx), PoleError);
  CHECK_THROWS_AS(i2(bubble("1", "1", "4", "1", "1", "0"), BubbleMethod::F1Form, ctx), PoleError);
  CHECK_NOTHROW(validate(bubble("1", "1", "3", "1", "1", "3.9"), ctx));
}

TEST_CASE("bubble tadpole limit") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  Real msq = lit("1.7");
  BubbleKinematics k{Real(1), Real(1), Real(3), msq, msq, Real(0)};
  Real truth = sqrt(pi()) / sqrt(msq);
  for (auto m : {BubbleMethod::F1Form, BubbleMethod::EqualMass3F2, BubbleMethod::Quadrature,
                 BubbleMethod::KdFForm}) {
    CAPTURE(to_string(m));
    CHECK(agrees(i2(k, m, ctx).value, truth, 40));
  }
}

TEST_CASE("bubble cross-method at the reference point") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = bubble("1", "1.5", "4.4", "0.04", "1", "-0.3");
  const Real frozen = lit("2.65260881180061136023420115733704189367071996");
  CHECK(agrees(i2(k, BubbleMethod::Quadrature, ctx).value, frozen, 30));
  CHECK(agrees(i2(k, BubbleMethod::F1Form, ctx).value, frozen, 30));
  CHECK(agrees(i2(k, BubbleMethod::F4Form, ctx).value, frozen, 30));
  // Here 1 - m1sq/m2sq = 0.96 lies beyond the admitted KdF domain.
  CHECK_FALSE(i2_admits(k, BubbleMethod::KdFForm, ctx));
  CHECK_THROWS_AS(i2(k, BubbleMethod::KdFForm, ctx), DomainError);
  CHECK_FALSE(i2_admits(k, BubbleMethod::EqualMass3F2, ctx));
}

TEST_CASE("bubble: all methods where all are admitted") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = bubble("1.2", "0.8", "3.7", "0.55", "1", "-0.04");
  for (auto m : {BubbleMethod::F1Form, BubbleMethod::F4Form, BubbleMethod::KdFForm})
    REQUIRE(i2_admits(k, m, ctx));
  Real q = i2(k, BubbleMethod::Quadrature, ctx).value;
  for (auto m : {BubbleMethod::F1Form, BubbleMethod::F4Form, BubbleMethod::KdFForm}) {
    CAPTURE(to_string(m));
    CHECK(agrees(i2(k, m, ctx).value, q, 30));
  }
}

TEST_CASE("bubble frozen point above the x axis") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = bubble("0.7", "1.6", "3.3", "0.6", "1.2", "0.4");
  const Real frozen = lit("1.24446389621548789043615889679256488151836391");
  CHECK(agrees(i2(k, BubbleMethod::Quadrature, ctx).value, frozen, 30));
  // Complex roots x±: only the KdF series reaches this point analytically.
  CHECK_FALSE(i2_admits(k, BubbleMethod::F1Form, ctx));
  CHECK(agrees(i2(k, BubbleMethod::KdFForm, ctx).value, frozen, 30));
}

TEST_CASE("bubble equal masses") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = bubble("1", "1.5", "4.4", "0.8", "0.8", "-0.5");
  Real q = i2(k, BubbleMethod::Quadrature, ctx).value;
  CHECK(agrees(i2(k, BubbleMethod::EqualMass3F2, ctx).value, q, 30));
  CHECK(agrees(i2(k, BubbleMethod::F1Form, ctx).value, q, 30));

  // At zero momentum the 3F2 collapses to 1.
  auto z = bubble("1", "2", "3.4", "0.8", "0.8", "0");
  Real b = z.nu1 + z.nu2 - z.d / 2;
  Real expect = -tgamma_raw(b) / tgamma_raw(z.nu1 + z.nu2) * pow(z.m2sq, -b);  // (-1)^3
  CHECK(agrees(i2(z, BubbleMethod::EqualMass3F2, ctx).value, expect, 30));
  CHECK(agrees(i2(z, BubbleMethod::Quadrature, ctx).value, expect, 30));
}

TEST_CASE("bubble special line s12 = m1sq - m2sq") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = bubble("1", "1.5", "4.4", "0.6", "1.1", "-0.5");
  CHECK(agrees(i2_special_line(k, ctx).value, i2(k, BubbleMethod::Quadrature, ctx).value, 30));
  auto off = bubble("1", "1.5", "4.4", "0.6", "1.1", "-0.4");
  CHECK_THROWS_AS(i2_special_line(off, ctx), DomainError);
}

TEST_CASE("bubble mass-swap symmetry and scaling") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unu(0.6, 2.0), ud(2.3, 5.7), um(0.2, 2.0), us(-1.5, 0.1);
  int checked = 0;
  while (checked < 6) {
    BubbleKinematics k{Real(unu(rng)), Real(unu(rng)), Real(ud(rng)), Real(um(rng)),
                       Real(um(rng)), Real(us(rng))};
    BubbleKinematics s{k.nu2, k.nu1, k.d, k.m2sq, k.m1sq, k.s12};
    if (!i2_admits(k, BubbleMethod::F1Form, ctx) || !i2_admits(s, BubbleMethod::F1Form, ctx))
      continue;
    Real a = i2(k, BubbleMethod::F1Form, ctx).value;
    CHECK(agrees(a, i2(s, BubbleMethod::F1Form, ctx).value, 30));
    Real lambda = lit("2.75");
    BubbleKinematics scaled{k.nu1, k.nu2, k.d, lambda * k.m1sq, lambda * k.m2sq, lambda * k.s12};
    Real expect = pow(lambda, k.d / 2 - k.nu1 - k.nu2) * a;
    CHECK(agrees(i2(scaled, BubbleMethod::F1Form, ctx).value, expect, 30));
    ++checked;
  }
}

TEST_CASE("closed bubbles") {
  auto ctx = PrecisionContext::for_digits(40);
  PrecisionScope scope(ctx.working_digits());
  const Real spi = sqrt(pi());
  CHECK(agrees(i2_bubble_closed(Real(1), Real(3), BubbleClosedVariant::MassiveZeroMomentum, Real(0),
                                ctx)
                   .value,
               2 * spi, 40));
  CHECK(agrees(
      i2_bubble_closed(Real(0), Real(3), BubbleClosedVariant::Massless, Real(-1), ctx).value,
      spi * spi * spi, 40));
  CHECK_THROWS_AS(
      i2_bubble_closed(Real(1), Real(4), BubbleClosedVariant::MassiveZeroMomentum, Real(0), ctx),
      PoleError);
  CHECK_THROWS_AS(
      i2_bubble_closed(Real(0), Real(3), BubbleClosedVariant::Massless, Real(1), ctx),
      DomainError);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> ud(2.2, 5.8), um(0.3, 3.0), us(-3.0, 0.9);
  for (int i = 0; i < 10; ++i) {
    Real d(ud(rng));
    if (abs(d - 4) < Real(1) / 20) d = d + Real(1) / 5;
    Real msq(um(rng));
    Real s = Real(us(rng)) * msq;
    BubbleKinematics zero{Real(1), Real(1), d, Real(0), msq, Real(0)};
    CHECK(agrees(i2_bubble_closed(msq, d, BubbleClosedVariant::MassiveZeroMomentum, Real(0), ctx)
                     .value,
                 i2(zero, BubbleMethod::Quadrature, ctx).value, 40));
    BubbleKinematics one{Real(1), Real(1), d, Real(0), msq, s};
    CHECK(agrees(i2_bubble_closed(msq, d, BubbleClosedVariant::OneMass, s, ctx).value,
                 i2(one, BubbleMethod::Quadrature, ctx).value, 40));
    // Massless: Γ(2-d/2) ∫ (-s u(1-u))^(d/2-2) du by direct quadrature.
    Real neg = -abs(s) - Real(1) / 10;
    NumValue direct = quad_de_endpoint(
        [&](const QuadNode& n) { return pow(-neg * n.from_lower * n.from_upper, d / 2 - 2); },
        Real(0), Real(1), ctx);
    CHECK(agrees(i2_bubble_closed(msq, d, BubbleClosedVariant::Massless, neg, ctx).value,
                 tgamma_raw(2 - d / 2) * direct.value, 40));
  }
}

TEST_CASE("vertex F1 formula against quadrature and frozen values") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  struct Case {
    VertexKinematics k;
    const char* value;
  };
  const Case cases[] = {
      {vertex("4.6", "1", "-0.4", "-1.1"), "-1.31479837463202796320703152980776330664372858"},
      {vertex("3.4", "2", "-0.3", "-0.7"), "-1.60527799120091633492699919542550939838337608"},
      {vertex("5.2", "1.5", "0.5", "-0.2"), "-1.8209424270446308231232063342635193131122581"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.k.d.to_double());
    Real f = i3(c.k, VertexMethod::F1Formula, ctx).value;
    Real q = i3(c.k, VertexMethod::Quadrature, ctx).value;
    CHECK(agrees(f, lit(c.value), 30));
    CHECK(agrees(q, lit(c.value), 30));
  }
}

TEST_CASE("vertex recurrence") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto bad = vertex("4.6", "1", "-0.4", "-1.1");
  CHECK(recurrence_rate(bad) > 1);
  CHECK_FALSE(i3_admits(bad, VertexMethod::Recurrence, ctx));
  CHECK_THROWS_AS(i3(bad, VertexMethod::Recurrence, ctx), NonConvergence);

  for (auto k : {vertex("4.6", "1", "-0.4", "-0.5"), vertex("3.4", "1", "-0.2", "-0.3"),
                 vertex("5.2", "1.3", "-0.9", "-0.6")}) {
    CAPTURE(k.d.to_double());
    REQUIRE(i3_admits(k, VertexMethod::Recurrence, ctx));
    CHECK(agrees(i3(k, VertexMethod::Recurrence, ctx).value,
                 i3(k, VertexMethod::F1Formula, ctx).value, 30));
    CHECK(i3_recurrence_residual(k, ctx).value <= pow10(-ctx.target_digits() + 5));
  }
}

TEST_CASE("vertex sigma form") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  for (auto k : {vertex("4.6", "1", "-0.4", "-0.5"), vertex("3.4", "2", "-0.3", "-0.7")}) {
    CHECK(agrees(i3_sigma_form(k, ctx).value, i3(k, VertexMethod::F1Formula, ctx).value, 30));
  }
}

TEST_CASE("vertex at s12 = 0 collapses to 2F1 terms") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto k = vertex("3.4", "1", "0", "-0.6");
  const Real& d = k.d;
  Real zero = i2_bubble_closed(k.msq, d, BubbleClosedVariant::MassiveZeroMomentum, Real(0), ctx).value;
  Real massless = i2_bubble_closed(k.msq, d, BubbleClosedVariant::Massless, k.s13, ctx).value;
  Real omega = -k.s13 / k.msq;
  // F1(1,1,2-d/2;d/2;w,0) = 2F1(1,1;d/2;w).
  Real expect = zero / k.msq * hyp2f1({Real(1), Real(1), d / 2}, omega, ctx).value -
                massless / k.msq * hyp2f1({Real(1), (d - 2) / 2, d - 2}, omega, ctx).value;
  CHECK(agrees(i3(k, VertexMethod::F1Formula, ctx).value, expect, 30));
  CHECK(agrees(i3(k, VertexMethod::Quadrature, ctx).value, expect, 30));
}

TEST_CASE("vertex validation") {
  auto ctx = PrecisionContext::for_digits(30);
  CHECK_THROWS_AS(validate(vertex("4.6", "1", "1.2", "-0.5"), ctx), DomainError);
  CHECK_THROWS_AS(validate(vertex("4.6", "1", "-0.5", "0.2"), ctx), DomainError);
  CHECK_THROWS_AS(validate(vertex("4.6", "1", "-0.5", "-0.5"), ctx), DomainError);
  CHECK_THROWS_AS(validate(vertex("6.6", "1", "-0.4", "-0.5"), ctx), DomainError);
  // (s12 - s13)/m^2 >= 1: the quadrature still applies, the F1 formula does not.
  auto wide = vertex("3.4", "1", "0.5", "-0.7");
  CHECK_FALSE(i3_admits(wide, VertexMethod::F1Formula, ctx));
  CHECK(i3_admits(wide, VertexMethod::Quadrature, ctx));
  CHECK_NOTHROW(i3(wide, VertexMethod::Quadrature, ctx));
}

TEST_CASE("vertex ODE residual") {
  auto ctx = PrecisionContext::for_digits(50);
  PrecisionScope scope(ctx.working_digits());
  auto k = vertex("4.6", "1", "-0.4", "-1.1");
  Real I = abs(i3(k, VertexMethod::F1Formula, ctx).value);
  Real r = i3_ode_residual(k, ctx).value;
  CHECK(r <= pow10(-ctx.target_digits() + 10) * I);

  OdeResidualOptions half;
  half.step = pow10(-ctx.working_digits() / 5) / 2;
  Real r2 = i3_ode_residual(k, ctx, half).value;
  CHECK(abs(r2 - r) <= max(r, r2));
  CHECK(r2 <= pow10(-ctx.target_digits() + 10) * I);

  OdeResidualOptions broken;
  broken.bubble_scale = 1 + pow10(-5);
  CHECK(i3_ode_residual(k, ctx, broken).value > pow10(-7) * I);
}

TEST_CASE("sunrise values and methods") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  SunriseKinematics a{Real(5), Real(1), Real(4)};
  const Real fa = lit("-12.0003493499463793045714973227270323516326336");
  CHECK(agrees(im_j3(a, SunriseMethod::Series2F1, ctx).value, fa, 30));
  CHECK(agrees(im_j3(a, SunriseMethod::Quadrature, ctx).value, fa, 30));

  SunriseKinematics b{Real(7), lit("1.7"), lit("3.4")};
  const Real fb = lit("-25.0303628409212048605328459679229152110949448");
  CHECK(agrees(im_j3(b, SunriseMethod::Series2F1, ctx).value, fb, 30));
  CHECK(agrees(im_j3(b, SunriseMethod::Quadrature, ctx).value, fb, 30));

  for (const char* x : {"3.5", "4", "8"})
    for (const char* d : {"2.6", "3", "4.6", "5.5"}) {
      SunriseKinematics k{lit(x), lit("0.8"), lit(d)};
      CAPTURE(x);
      CAPTURE(d);
      CHECK(agrees(im_j3(k, SunriseMethod::Series2F1, ctx).value,
                   im_j3(k, SunriseMethod::Quadrature, ctx).value, 28));
    }
  CHECK_THROWS_AS(im_j3({Real(3), Real(1), Real(4)}, SunriseMethod::Series2F1, ctx), DomainError);
  CHECK_THROWS_AS(im_j3({Real(5), Real(1), Real(7)}, SunriseMethod::Series2F1, ctx), DomainError);
}

TEST_CASE("sunrise difference equation and threshold") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  for (const char* x : {"3.5", "5", "8"})
    for (const char* d : {"3", "3.4", "4"}) {
      SunriseKinematics k{lit(x), lit("1.3"), lit(d)};
      CHECK(im_j3_diffeq_residual(k, ctx).value <= pow10(-ctx.target_digits() + 10));
    }
  Real prev = abs(im_j3({lit("3.1"), Real(1), Real(4)}, SunriseMethod::Series2F1, ctx).value);
  for (const char* x : {"3.01", "3.001", "3.0001"}) {
    Real v = abs(im_j3({lit(x), Real(1), Real(4)}, SunriseMethod::Series2F1, ctx).value);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < pow10(-5));
}
