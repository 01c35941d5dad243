#include "feynhyper/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace feynhyper {

Real point_real(const Point& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw std::invalid_argument("missing parameter '" + name + "'");
  return Real(std::string_view(it->second));
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "?";
}

namespace {

using P = const Point&;
using C = const PrecisionContext&;

Real half() { return Real(1) / 2; }

// Decimal literal uniform in (lo, hi) with 8 decimals; the double path is
// IEEE-exact, so draws are identical on every platform.
std::string uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8f", lo + (hi - lo) * u);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string pick(std::mt19937_64& rng, std::initializer_list<const char*> options) {
  const auto n = static_cast<std::uint64_t>(options.size());
  return *(options.begin() + static_cast<std::ptrdiff_t>(rng() % n));
}

// Predicate wrapper: any evaluation error counts as outside the domain.
template <typename F>
bool guarded(F f) {
  try {
    return f();
  } catch (const EvaluationError&) {
    return false;
  }
}

bool pole_free(std::initializer_list<Real> args, C ctx) {
  for (const Real& a : args)
    if (near_nonpositive_integer(a, ctx)) return false;
  return true;
}

NumValue G(const Real& z, C ctx) { return gamma(z, ctx); }

NumValue num(const Real& r) { return NumValue(r); }

bool in_f4_domain(const Real& x, const Real& y) {
  return sqrt(abs(x)) + sqrt(abs(y)) <= series_radius();
}

// Roots of 1 - (1+x-y)u + x u^2 = (1 - x- u)(1 - x+ u), ordered x- <= x+.
std::pair<Real, Real> roots_xy(const Real& x, const Real& y, C ctx) {
  BubbleKinematics k{Real(1), Real(1), Real(3), y, Real(1), x};
  return bubble_xpm(k, ctx);
}

// Roots of t^2 - (x+y) t + x, cancellation-free.
std::pair<Real, Real> roots_kdf(const Real& x, const Real& y) {
  const Real s = x + y;
  const Real disc = s * s - 4 * x;
  if (disc.sign() < 0) throw DomainError("KdF reduction needs real z+-");
  const Real r = sqrt(disc);
  if (s.sign() >= 0) {
    const Real zp = (s + r) / 2;
    const Real zm = zp.is_zero() ? Real(0) : x / zp;
    return {zm, zp};
  }
  const Real zm = (s - r) / 2;
  return {zm, x / zm};
}

// --- bubble / vertex / sunrise points ------------------------------------------

BubbleKinematics bubble_at(P p) {
  return {point_real(p, "nu1"), point_real(p, "nu2"), point_real(p, "d"),
          point_real(p, "m1sq"), point_real(p, "m2sq"), point_real(p, "s12")};
}

BubbleKinematics swapped(const BubbleKinematics& k) {
  return {k.nu2, k.nu1, k.d, k.m2sq, k.m1sq, k.s12};
}

VertexKinematics vertex_at(P p) {
  return {point_real(p, "msq"), point_real(p, "s12"), point_real(p, "s13"), point_real(p, "d")};
}

SunriseKinematics sunrise_at(P p) {
  return {point_real(p, "x"), point_real(p, "msq"), point_real(p, "d")};
}

Point draw_bubble(std::mt19937_64& rng) {
  Point p{{"nu1", uniform(rng, 0.6, 2.0)}, {"nu2", uniform(rng, 0.6, 2.0)},
          {"d", uniform(rng, 2.3, 5.7)},   {"m1sq", uniform(rng, 0.05, 1.5)},
          {"m2sq", uniform(rng, 0.5, 1.5)}, {"s12", uniform(rng, -1.0, 0.3)}};
  if (rng() % 4 == 0) p["m1sq"] = p["m2sq"];
  return p;
}

Point draw_vertex(std::mt19937_64& rng) {
  return {{"d", pick(rng, {"3.4", "4.6", "5.2"})},
          {"msq", uniform(rng, 0.7, 1.5)},
          {"s12", uniform(rng, -1.2, 0.5)},
          {"s13", uniform(rng, -1.2, -0.1)}};
}

Point draw_sunrise(std::mt19937_64& rng) {
  return {{"x", uniform(rng, 3.1, 9.0)},
          {"msq", uniform(rng, 0.5, 2.0)},
          {"d", uniform(rng, 2.5, 5.5)}};
}

const std::vector<BubbleMethod> kAnalyticBubble{BubbleMethod::F1Form, BubbleMethod::F4Form,
                                                BubbleMethod::KdFForm,
                                                BubbleMethod::EqualMass3F2};

// --- individual records --------------------------------------------------------

IdentityRecord id_swap() {
  IdentityRecord r;
  r.id = "ID-SWAP";
  r.description =
      "Bubble mass-swap symmetry: I(nu1,nu2;m1,m2) = I(nu2,nu1;m2,m1), both sides by F1_FORM, "
      "which maps the F1 arguments through x -> x/(x-1).";
  r.citation = "bubble integral: mass-swap symmetry of the F1 closed form (Pfaff image)";
  r.defaults = {{"nu1", "1"}, {"nu2", "1.5"}, {"d", "4.4"},
                {"m1sq", "0.04"}, {"m2sq", "1"}, {"s12", "-0.3"}};
  r.lhs = [](P p, C ctx) { return i2(bubble_at(p), BubbleMethod::F1Form, ctx); };
  r.rhs = [](P p, C ctx) { return i2(swapped(bubble_at(p)), BubbleMethod::F1Form, ctx); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const auto k = bubble_at(p);
      return k.m1sq.sign() > 0 && i2_admits(k, BubbleMethod::F1Form, ctx) &&
             i2_admits(swapped(k), BubbleMethod::F1Form, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"nu1", uniform(rng, 0.6, 2.0)}, {"nu2", uniform(rng, 0.6, 2.0)},
                 {"d", uniform(rng, 2.3, 5.7)},   {"m1sq", uniform(rng, 0.2, 2.0)},
                 {"m2sq", uniform(rng, 0.2, 2.0)}, {"s12", uniform(rng, -1.5, 0.1)}};
  };
  r.sampler_box = "nu1,nu2 in (0.6,2); d in (2.3,5.7); m1sq,m2sq in (0.2,2); s12 in (-1.5,0.1)";
  return r;
}

IdentityRecord id_f1f4() {
  IdentityRecord r;
  r.id = "ID-F1F4";
  r.description =
      "F1(nu1,b,b;nu1+nu2;x-,x+) with b = nu1+nu2-d/2 equals a Gamma-weighted sum of two "
      "Appell F4 values at (x, y).";
  r.citation = "bubble integral: F1 closed form against the Mellin-Barnes F4 form";
  r.defaults = {{"nu1", "1"}, {"nu2", "1.5"}, {"d", "4.4"}, {"x", "-0.3"}, {"y", "0.04"}};
  r.lhs = [](P p, C ctx) {
    const Real nu1 = point_real(p, "nu1"), nu2 = point_real(p, "nu2"), d = point_real(p, "d");
    const Real b = nu1 + nu2 - d / 2;
    auto [xm, xp] = roots_xy(point_real(p, "x"), point_real(p, "y"), ctx);
    return appell_f1({nu1, b, b, nu1 + nu2}, xm, xp, ctx);
  };
  r.rhs = [](P p, C ctx) {
    const Real nu1 = point_real(p, "nu1"), nu2 = point_real(p, "nu2"), d = point_real(p, "d");
    const Real x = point_real(p, "x"), y = point_real(p, "y");
    const Real h = d / 2;
    const Real b = nu1 + nu2 - h;
    const NumValue g12 = G(nu1 + nu2, ctx);
    NumValue t1 = G(h - nu1, ctx) * g12 / (G(h, ctx) * G(nu2, ctx)) *
                  appell_f4({nu1, b, h, nu1 - h + 1}, x, y, ctx);
    NumValue t2 = num(pow(y, h - nu1)) * G(nu1 - h, ctx) * g12 / (G(nu1, ctx) * G(b, ctx)) *
                  appell_f4({nu2, h, h, h - nu1 + 1}, x, y, ctx);
    return t1 + t2;
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real nu1 = point_real(p, "nu1"), nu2 = point_real(p, "nu2"), d = point_real(p, "d");
      const Real x = point_real(p, "x"), y = point_real(p, "y");
      const Real h = d / 2, b = nu1 + nu2 - h;
      if (!(nu1.sign() > 0 && nu2.sign() > 0 && y.sign() > 0 && in_f4_domain(x, y))) return false;
      if (kallen(Real(1), x, y).sign() < 0 || near_integer(h - nu1, ctx)) return false;
      if (!pole_free({b, h, nu1 + nu2, nu1 - h + 1, h - nu1 + 1}, ctx)) return false;
      auto [xm, xp] = roots_xy(x, y, ctx);
      return appell_f1_admissible({nu1, b, b, nu1 + nu2}, xm, xp, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"nu1", uniform(rng, 0.5, 2.0)}, {"nu2", uniform(rng, 0.5, 2.0)},
                 {"d", uniform(rng, 2.5, 5.5)},   {"x", uniform(rng, -0.3, 0.3)},
                 {"y", uniform(rng, 0.01, 0.3)}};
  };
  r.sampler_box = "nu1,nu2 in (0.5,2); d in (2.5,5.5); x in (-0.3,0.3); y in (0.01,0.3)";
  return r;
}

IdentityRecord id_bailey() {
  IdentityRecord r;
  r.id = "ID-BAILEY";
  r.description =
      "Bailey: F4(a,b;g,b; -x/((1-x)(1-y)), -y/((1-x)(1-y))) = ((1-x)(1-y))^a "
      "F1(a,g-b,1+a-g;g;x,xy).";
  r.citation = "Bailey reduction of F4 with c2 = b to F1";
  r.defaults = {{"a", "0.5"}, {"b", "0.75"}, {"g", "1.25"}, {"x", "0.1"}, {"y", "0.2"}};
  r.lhs = [](P p, C ctx) {
    const Real x = point_real(p, "x"), y = point_real(p, "y");
    const Real den = (1 - x) * (1 - y);
    return appell_f4({point_real(p, "a"), point_real(p, "b"), point_real(p, "g"), point_real(p, "b")},
                     -x / den, -y / den, ctx);
  };
  r.rhs = [](P p, C ctx) {
    const Real a = point_real(p, "a"), b = point_real(p, "b"), g = point_real(p, "g");
    const Real x = point_real(p, "x"), y = point_real(p, "y");
    return num(pow((1 - x) * (1 - y), a)) * appell_f1({a, g - b, 1 + a - g, g}, x, x * y, ctx);
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real a = point_real(p, "a"), b = point_real(p, "b"), g = point_real(p, "g");
      const Real x = point_real(p, "x"), y = point_real(p, "y");
      if (!(x < 1 && y < 1)) return false;
      const Real den = (1 - x) * (1 - y);
      return pole_free({g, b}, ctx) && in_f4_domain(x / den, y / den) &&
             appell_f1_admissible({a, g - b, 1 + a - g, g}, x, x * y, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"a", uniform(rng, 0.2, 2.0)}, {"b", uniform(rng, 0.2, 2.0)},
                 {"g", uniform(rng, 0.5, 2.5)}, {"x", uniform(rng, -0.3, 0.3)},
                 {"y", uniform(rng, -0.3, 0.3)}};
  };
  r.sampler_box = "a,b in (0.2,2); g in (0.5,2.5); x,y in (-0.3,0.3)";
  return r;
}

IdentityRecord id_f4tof1() {
  IdentityRecord r;
  r.id = "ID-F4TOF1";
  r.description =
      "F4(alpha,beta;betap,alpha-betap+1;x,y) = Gamma-weighted F1(alpha,beta,beta;beta+betap;x-,x+) "
      "minus a second F1 at ((x-x-)/x, (x-x-)/(x-x+)).";
  r.citation = "reduction of F4 with c2 = a - c1 + 1 to two F1 functions";
  r.defaults = {{"alpha", "0.7"}, {"beta", "0.45"}, {"betap", "1.3"}, {"x", "-0.1"}, {"y", "0.2"}};
  r.lhs = [](P p, C ctx) {
    const Real al = point_real(p, "alpha"), be = point_real(p, "beta"), bp = point_real(p, "betap");
    return appell_f4({al, be, bp, al - bp + 1}, point_real(p, "x"), point_real(p, "y"), ctx);
  };
  r.rhs = [](P p, C ctx) {
    const Real al = point_real(p, "alpha"), be = point_real(p, "beta"), bp = point_real(p, "betap");
    const Real x = point_real(p, "x"), y = point_real(p, "y");
    auto [xm, xp] = roots_xy(x, y, ctx);
    const NumValue common = G(bp, ctx) * G(be - al + bp, ctx) / G(bp - al, ctx);
    NumValue t1 = common / G(be + bp, ctx) * appell_f1({al, be, be, be + bp}, xm, xp, ctx);
    NumValue t2 = common * G(al - bp, ctx) / (G(al, ctx) * G(be, ctx)) *
                  num(pow(y, bp - al) * pow(xp - x, al - be - bp)) *
                  appell_f1({be - al + bp, 1 - al, be, bp - al + 1}, (x - xm) / x,
                            (x - xm) / (x - xp), ctx);
    return t1 - t2;
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real al = point_real(p, "alpha"), be = point_real(p, "beta"),
                 bp = point_real(p, "betap");
      const Real x = point_real(p, "x"), y = point_real(p, "y");
      if (!(y.sign() > 0 && !x.is_zero() && in_f4_domain(x, y))) return false;
      if (kallen(Real(1), x, y).sign() < 0) return false;
      if (!pole_free({bp, be - al + bp, bp - al, be + bp, al - bp, al, be, al - bp + 1,
                      bp - al + 1},
                     ctx))
        return false;
      auto [xm, xp] = roots_xy(x, y, ctx);
      if (!((xp - x).sign() > 0)) return false;
      return appell_f1_admissible({al, be, be, be + bp}, xm, xp, ctx) &&
             appell_f1_admissible({be - al + bp, 1 - al, be, bp - al + 1}, (x - xm) / x,
                                  (x - xm) / (x - xp), ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"alpha", uniform(rng, 0.3, 1.5)}, {"beta", uniform(rng, 0.3, 1.5)},
                 {"betap", uniform(rng, 0.5, 2.0)}, {"x", uniform(rng, -0.3, 0.3)},
                 {"y", uniform(rng, 0.02, 0.3)}};
  };
  r.sampler_box = "alpha,beta in (0.3,1.5); betap in (0.5,2); x in (-0.3,0.3); y in (0.02,0.3)";
  return r;
}

IdentityRecord id_kdf() {
  IdentityRecord r;
  r.id = "ID-KDF";
  r.description =
      "Kampe de Feriet F^{2;1;0}_{1;0;0}(alpha,nu1,nu2;x,y) = F1(nu1,alpha,alpha;nu1+nu2;z-,z+) "
      "with z+- the roots of t^2 - (x+y) t + x.";
  r.citation = "reduction of the Kampe de Feriet bubble representation to F1";
  r.defaults = {{"alpha", "1.5"}, {"nu1", "1"}, {"nu2", "2"}, {"x", "0.09"}, {"y", "0.8"}};
  r.lhs = [](P p, C ctx) {
    return kdf_f210({point_real(p, "alpha"), point_real(p, "nu1"), point_real(p, "nu2")},
                    point_real(p, "x"), point_real(p, "y"), ctx);
  };
  r.rhs = [](P p, C ctx) {
    const Real al = point_real(p, "alpha"), nu1 = point_real(p, "nu1"), nu2 = point_real(p, "nu2");
    auto [zm, zp] = roots_kdf(point_real(p, "x"), point_real(p, "y"));
    return appell_f1({nu1, al, al, nu1 + nu2}, zm, zp, ctx);
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real al = point_real(p, "alpha"), nu1 = point_real(p, "nu1"),
                 nu2 = point_real(p, "nu2");
      const Real x = point_real(p, "x"), y = point_real(p, "y");
      if (!(kdf_growth_rate(x.to_double(), y.to_double()) <= 0.95)) return false;
      if (!pole_free({nu1 + nu2}, ctx)) return false;
      auto [zm, zp] = roots_kdf(x, y);
      return appell_f1_admissible({nu1, al, al, nu1 + nu2}, zm, zp, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"alpha", uniform(rng, 0.3, 2.0)}, {"nu1", uniform(rng, 0.5, 2.0)},
                 {"nu2", uniform(rng, 0.5, 2.0)},   {"x", uniform(rng, -0.2, 0.2)},
                 {"y", uniform(rng, -0.5, 0.8)}};
  };
  r.sampler_box = "alpha in (0.3,2); nu1,nu2 in (0.5,2); x in (-0.2,0.2); y in (-0.5,0.8)";
  return r;
}

IdentityRecord id_f1_3f2() {
  IdentityRecord r;
  r.id = "ID-F1-3F2";
  r.description =
      "F1(alpha,beta,beta;gamma;x,x/(x-1)) = 3F2(alpha,gamma-alpha,beta;gamma/2,(gamma+1)/2; "
      "x^2/(4(x-1))).";
  r.citation = "equal-mass bubble: F1 at (x, x/(x-1)) rewritten as a single 3F2";
  r.defaults = {{"alpha", "0.5"}, {"beta", "2"}, {"gamma", "1.5"}, {"x", "-0.5"}};
  r.lhs = [](P p, C ctx) {
    const Real x = point_real(p, "x"), b = point_real(p, "beta");
    return appell_f1({point_real(p, "alpha"), b, b, point_real(p, "gamma")}, x, x / (x - 1), ctx);
  };
  auto rhs_at = [](P p, const Real& u, C ctx) {
    const Real al = point_real(p, "alpha"), b = point_real(p, "beta"), g = point_real(p, "gamma");
    return hyp3f2({al, g - al, b, g / 2, (g + 1) / 2}, u, ctx);
  };
  auto candidate = [](P p) {
    const Real x = point_real(p, "x");
    return x * x / (4 * (x - 1));
  };
  r.rhs = [rhs_at, candidate](P p, C ctx) { return rhs_at(p, candidate(p), ctx); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real x = point_real(p, "x"), g = point_real(p, "gamma");
      if (!(x < 1)) return false;
      const Real lim = series_radius();
      return abs(x) <= lim && abs(x / (x - 1)) <= lim && pole_free({g, g / 2, (g + 1) / 2}, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"alpha", uniform(rng, 0.2, 2.5)}, {"beta", uniform(rng, 0.2, 2.5)},
                 {"gamma", uniform(rng, 0.2, 2.5)}, {"x", uniform(rng, -0.9, 0.45)}};
  };
  r.sampler_box = "alpha,beta,gamma in (0.2,2.5); x in (-0.9,0.45) so x and x/(x-1) lie in (-0.9,0.95)";
  r.pin = PinSpec{"3F2 argument",
                  [](P) { return std::pair<Real, Real>(Real(-1) / 2, Real(1) / 2); },
                  [rhs_at](P p, C ctx) {
                    return [p, ctx, rhs_at](const Real& u) { return rhs_at(p, u, ctx); };
                  },
                  candidate, std::nullopt};
  return r;
}

IdentityRecord id_f1_anti() {
  IdentityRecord r;
  r.id = "ID-F1-ANTI";
  r.description =
      "F1(alpha,beta,beta;gamma;x,-x) = 3F2(alpha/2,(alpha+1)/2,beta;gamma/2,(gamma+1)/2;x^2).";
  r.citation = "F1 with opposite arguments reduced to 3F2 in x^2";
  r.defaults = {{"alpha", "0.5"}, {"beta", "2"}, {"gamma", "1.5"}, {"x", "0.4"}};
  r.lhs = [](P p, C ctx) {
    const Real x = point_real(p, "x"), b = point_real(p, "beta");
    return appell_f1({point_real(p, "alpha"), b, b, point_real(p, "gamma")}, x, -x, ctx);
  };
  r.rhs = [](P p, C ctx) {
    const Real al = point_real(p, "alpha"), b = point_real(p, "beta"), g = point_real(p, "gamma");
    const Real x = point_real(p, "x");
    return hyp3f2({al / 2, (al + 1) / 2, b, g / 2, (g + 1) / 2}, x * x, ctx);
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real x = point_real(p, "x"), g = point_real(p, "gamma");
      return abs(x) <= series_radius() && pole_free({g, g / 2, (g + 1) / 2}, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"alpha", uniform(rng, 0.2, 2.5)}, {"beta", uniform(rng, 0.2, 2.5)},
                 {"gamma", uniform(rng, 0.2, 2.5)}, {"x", uniform(rng, -0.9, 0.9)}};
  };
  r.sampler_box = "alpha,beta,gamma in (0.2,2.5); x in (-0.9,0.9)";
  return r;
}

IdentityRecord id_quad() {
  IdentityRecord r;
  r.id = "ID-QUAD";
  r.description =
      "Quadratic transformation: F1(1,1,2-d/2;d/2;w,z) = w/(2(w-z)(1-w)) 2F1(1,(d-2)/2;d/2;Z) + "
      "(w+zw-2z)/(2(w-z)(1-w)(1-z)) F1((d-2)/2,1,1/2;d/2;Z,-4z/(z-1)^2), Z = w^2/((w-z)(w-1)).";
  r.citation = "vertex integral: quadratic transformation of the vertex F1";
  r.defaults = {{"d", "4.6"}, {"w", "-0.3"}, {"z", "-0.7"}};
  r.lhs = [](P p, C ctx) {
    return appell_f1_onefold(point_real(p, "d"), point_real(p, "w"), point_real(p, "z"), ctx);
  };
  auto candidate = [](P p) {
    const Real w = point_real(p, "w"), z = point_real(p, "z");
    return w * w / ((w - z) * (w - 1));
  };
  // The 2F1 term with its argument left free; the F1 term keeps the
  // registered argument.
  auto rhs_of = [candidate](P p, C ctx) {
    const Real d = point_real(p, "d"), w = point_real(p, "w"), z = point_real(p, "z");
    const Real Z = candidate(p);
    const Real c1 = w / (2 * (w - z) * (1 - w));
    const Real c2 = (w + z * w - 2 * z) / (2 * (w - z) * (1 - w) * (1 - z));
    const NumValue f1 =
        num(c2) * appell_f1({(d - 2) / 2, Real(1), half(), d / 2}, Z, -4 * z / ((z - 1) * (z - 1)), ctx);
    return std::function<NumValue(const Real&)>([=](const Real& u) {
      return num(c1) * hyp2f1({Real(1), (d - 2) / 2, d / 2}, u, ctx) + f1;
    });
  };
  r.rhs = [rhs_of, candidate](P p, C ctx) { return rhs_of(p, ctx)(candidate(p)); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real d = point_real(p, "d"), w = point_real(p, "w"), z = point_real(p, "z");
      if (!(d > 2 && d < 6 && z < w && w.sign() < 0 && z > Real(-1))) return false;
      if (!(w - z >= Real(1) / 100)) return false;
      if (!pole_free({d / 2}, ctx)) return false;
      const Real Z = w * w / ((w - z) * (w - 1));
      return appell_f1_admissible({(d - 2) / 2, Real(1), half(), d / 2}, Z,
                                  -4 * z / ((z - 1) * (z - 1)), ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    std::string a = uniform(rng, -0.8, 0.0), b = uniform(rng, -0.8, 0.0);
    std::string d = uniform(rng, 2.5, 5.5);
    if (std::stod(a) < std::stod(b)) std::swap(a, b);
    return Point{{"d", d}, {"w", a}, {"z", b}};
  };
  r.sampler_box = "d in (2.5,5.5); w,z in (-0.8,0) ordered z < w with w - z >= 0.01";
  r.pin = PinSpec{"2F1 argument",
                  [](P) { return std::pair<Real, Real>(Real(-100), Real(9) / 10); }, rhs_of,
                  candidate, std::nullopt};
  return r;
}

Real f1_2f1_prefactor(const Real& x, const Real& d) {
  const Real x2 = x * x;
  const Real inner = Real(16) / 27 * x2 * (x + 3) * (x + 3) / ((x + 1) * (x + 1));
  return 2 * sqrt(Real(3)) / (x2 + 3) * pow(inner, (d - 2) / 2) *
         pow((x + 3) * (x - 1), (3 - d) / 2);
}

IdentityRecord id_f1_2f1() {
  IdentityRecord r;
  r.id = "ID-F1-2F1";
  r.description =
      "F1((d-1)/2,(3-d)/2,1/2;d-1;(x+1)(x-3)/((x-1)(x+3)),-(x+1)(x-3)/4) = closed prefactor "
      "times 2F1(1/3,2/3;d/2;Z(x)), Z(x) = x^2(x^2-9)^2/(x^2+3)^3.";
  r.citation = "sunrise cut: F1 from the cut integral against the 2F1 solution";
  r.defaults = {{"x", "5"}, {"d", "4"}};
  r.lhs = [](P p, C ctx) {
    const Real x = point_real(p, "x"), d = point_real(p, "d");
    const Real w = (x + 1) * (x - 3) / ((x - 1) * (x + 3));
    const Real z = -(x + 1) * (x - 3) / 4;
    return appell_f1({(d - 1) / 2, (3 - d) / 2, half(), d - 1}, w, z, ctx);
  };
  auto candidate = [](P p) { return sunrise_z(point_real(p, "x")); };
  auto rhs_of = [](P p, C ctx) {
    const Real x = point_real(p, "x"), d = point_real(p, "d");
    const Real pref = f1_2f1_prefactor(x, d);
    return std::function<NumValue(const Real&)>([=](const Real& u) {
      return num(pref) * hyp2f1({Real(1) / 3, Real(2) / 3, d / 2}, u, ctx);
    });
  };
  r.rhs = [rhs_of, candidate](P p, C ctx) { return rhs_of(p, ctx)(candidate(p)); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real x = point_real(p, "x"), d = point_real(p, "d");
      if (!(x > Real(3) && x <= Real(50) && d > 2 && d < 6)) return false;
      if (!pole_free({d - 1, d / 2}, ctx)) return false;
      const Real w = (x + 1) * (x - 3) / ((x - 1) * (x + 3));
      const Real z = -(x + 1) * (x - 3) / 4;
      return appell_f1_admissible({(d - 1) / 2, (3 - d) / 2, half(), d - 1}, w, z, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    std::string x = uniform(rng, 3.2, 9.0);
    return Point{{"x", x}, {"d", pick(rng, {"3", "4", "5"})}};
  };
  r.sampler_box = "x in (3.2,9); d in {3,4,5}";
  r.pin = PinSpec{"2F1 argument Z(x)",
                  [](P) { return std::pair<Real, Real>(Real(-1), Real(95) / 100); }, rhs_of,
                  candidate, std::pair<int, int>(6, 6)};
  return r;
}

IdentityRecord id_classic() {
  IdentityRecord r;
  r.id = "ID-CLASSIC";
  r.description = "F1(a,b,bp;b+bp;w,z) = (1-z)^(-a) 2F1(a,b;b+bp;(w-z)/(1-z)).";
  r.citation = "classical reduction of F1 with c = b + b' to 2F1";
  r.defaults = {{"a", "0.5"}, {"b", "0.5"}, {"bp", "0.5"}, {"w", "0.2"}, {"z", "0.1"}};
  r.lhs = [](P p, C ctx) {
    const Real b = point_real(p, "b"), bp = point_real(p, "bp");
    return appell_f1({point_real(p, "a"), b, bp, b + bp}, point_real(p, "w"), point_real(p, "z"),
                     ctx);
  };
  auto candidate = [](P p) {
    const Real w = point_real(p, "w"), z = point_real(p, "z");
    return (w - z) / (1 - z);
  };
  auto rhs_of = [](P p, C ctx) {
    const Real a = point_real(p, "a"), b = point_real(p, "b"), bp = point_real(p, "bp");
    const Real pref = pow(1 - point_real(p, "z"), -a);
    return std::function<NumValue(const Real&)>(
        [=](const Real& u) { return num(pref) * hyp2f1({a, b, b + bp}, u, ctx); });
  };
  r.rhs = [rhs_of, candidate](P p, C ctx) { return rhs_of(p, ctx)(candidate(p)); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const Real a = point_real(p, "a"), b = point_real(p, "b"), bp = point_real(p, "bp");
      const Real w = point_real(p, "w"), z = point_real(p, "z");
      if (!(w < 1 && z < 1)) return false;
      return pole_free({b + bp}, ctx) && appell_f1_admissible({a, b, bp, b + bp}, w, z, ctx);
    });
  };
  r.draw = [](std::mt19937_64& rng) {
    return Point{{"a", uniform(rng, 0.2, 2.0)}, {"b", uniform(rng, 0.2, 2.0)},
                 {"bp", uniform(rng, 0.2, 2.0)}, {"w", uniform(rng, -0.9, 0.9)},
                 {"z", uniform(rng, -0.9, 0.9)}};
  };
  r.sampler_box = "a,b,bp in (0.2,2); w,z in (-0.9,0.9)";
  r.pin = PinSpec{"2F1 argument",
                  [](P) { return std::pair<Real, Real>(Real(-40), Real(98) / 100); }, rhs_of,
                  candidate, std::nullopt};
  return r;
}

IdentityRecord id_ramanujan() {
  IdentityRecord r;
  r.id = "ID-RAMANUJAN";
  r.description =
      "2F1(1/2,1/2;1;k^2), k^2 = (x+1)^3(x-3)/((x-1)^3(x+3)), equals "
      "sqrt(3(x+3)(x-1)^3)/(x^2+3) 2F1(1/3,2/3;1;Z(x)); the LHS is evaluated as pi/(2 agm).";
  r.citation = "sunrise at d = 2: Ramanujan-type cubic relation between elliptic integrals";
  r.defaults = {{"x", "4"}};
  r.lhs = [](P p, C ctx) {
    PrecisionScope scope(ctx.working_digits());
    const Real x = point_real(p, "x");
    // 1 - k^2 = 16x / ((x-1)^3 (x+3)) exactly.
    const Real xm1 = x - 1;
    const Real kp2 = 16 * x / (xm1 * xm1 * xm1 * (x + 3));
    const Real v = 1 / agm(Real(1), sqrt(kp2));
    return NumValue(v, abs(v) * pow10(-ctx.working_digits() + 3));
  };
  auto candidate = [](P p) { return sunrise_z(point_real(p, "x")); };
  auto rhs_of = [](P p, C ctx) {
    const Real x = point_real(p, "x");
    const Real xm1 = x - 1;
    const Real pref = sqrt(3 * (x + 3) * xm1 * xm1 * xm1) / (x * x + 3);
    return std::function<NumValue(const Real&)>([=](const Real& u) {
      return num(pref) * hyp2f1({Real(1) / 3, Real(2) / 3, Real(1)}, u, ctx);
    });
  };
  r.rhs = [rhs_of, candidate](P p, C ctx) { return rhs_of(p, ctx)(candidate(p)); };
  r.domain = [](P p, C) {
    const Real x = point_real(p, "x");
    return x > Real(3) && x <= Real(50);
  };
  r.draw = [](std::mt19937_64& rng) { return Point{{"x", uniform(rng, 3.2, 9.0)}}; };
  r.sampler_box = "x in (3.2,9)";
  r.pin = PinSpec{"2F1 argument Z(x)",
                  [](P) { return std::pair<Real, Real>(Real(-1), Real(95) / 100); }, rhs_of,
                  candidate, std::pair<int, int>(6, 6)};
  return r;
}

IdentityRecord id_i2_xmethod() {
  IdentityRecord r;
  r.id = "ID-I2-XMETHOD";
  r.description =
      "Bubble integral: QUADRATURE against every admitted closed form (F1_FORM, F4_FORM, "
      "KDF_FORM, EQUAL_MASS_3F2).";
  r.citation = "bubble integral: Feynman-parameter integral against its hypergeometric forms";
  r.defaults = {{"nu1", "1"}, {"nu2", "1.5"}, {"d", "4.4"},
                {"m1sq", "0.04"}, {"m2sq", "1"}, {"s12", "-0.3"}};
  r.lhs = [](P p, C ctx) { return i2(bubble_at(p), BubbleMethod::Quadrature, ctx); };
  r.rhs = [](P p, C ctx) {
    const auto k = bubble_at(p);
    for (auto m : kAnalyticBubble)
      if (i2_admits(k, m, ctx)) return i2(k, m, ctx);
    throw DomainError("no closed form admitted");
  };
  r.rhs_alternatives = [](P p, C ctx) {
    const auto k = bubble_at(p);
    std::vector<NamedValue> out;
    for (auto m : kAnalyticBubble)
      if (i2_admits(k, m, ctx)) out.push_back({std::string(to_string(m)), i2(k, m, ctx)});
    return out;
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const auto k = bubble_at(p);
      if (!i2_admits(k, BubbleMethod::Quadrature, ctx)) return false;
      return std::any_of(kAnalyticBubble.begin(), kAnalyticBubble.end(),
                         [&](BubbleMethod m) { return i2_admits(k, m, ctx); });
    });
  };
  r.draw = draw_bubble;
  r.sampler_box =
      "nu1,nu2 in (0.6,2); d in (2.3,5.7); m1sq in (0.05,1.5); m2sq in (0.5,1.5); s12 in (-1,0.3); "
      "one draw in four sets m1sq = m2sq";
  return r;
}

IdentityRecord id_i3_xmethod() {
  IdentityRecord r;
  r.id = "ID-I3-XMETHOD";
  r.description = "Vertex integral: F1_FORMULA against QUADRATURE and, where admitted, RECURRENCE.";
  r.citation = "vertex integral: F1 form against the Feynman-parameter integral and the "
               "dimensional recurrence solution";
  r.defaults = {{"d", "4.6"}, {"msq", "1"}, {"s12", "-0.4"}, {"s13", "-1.1"}};
  r.lhs = [](P p, C ctx) { return i3(vertex_at(p), VertexMethod::F1Formula, ctx); };
  r.rhs = [](P p, C ctx) { return i3(vertex_at(p), VertexMethod::Quadrature, ctx); };
  r.rhs_alternatives = [](P p, C ctx) {
    const auto k = vertex_at(p);
    std::vector<NamedValue> out;
    if (i3_admits(k, VertexMethod::Recurrence, ctx))
      out.push_back({"RECURRENCE", i3(k, VertexMethod::Recurrence, ctx)});
    return out;
  };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const auto k = vertex_at(p);
      return i3_admits(k, VertexMethod::F1Formula, ctx) &&
             i3_admits(k, VertexMethod::Quadrature, ctx);
    });
  };
  r.draw = draw_vertex;
  r.sampler_box = "d in {3.4,4.6,5.2}; msq in (0.7,1.5); s12 in (-1.2,0.5); s13 in (-1.2,-0.1)";
  return r;
}

IdentityRecord id_imj3_xmethod() {
  IdentityRecord r;
  r.id = "ID-IMJ3-XMETHOD";
  r.description = "Sunrise imaginary part: SERIES_2F1 against QUADRATURE of the cut integral.";
  r.citation = "sunrise cut: 2F1 solution against the cut-integral representation";
  r.defaults = {{"x", "5"}, {"msq", "1"}, {"d", "4"}};
  r.lhs = [](P p, C ctx) { return im_j3(sunrise_at(p), SunriseMethod::Series2F1, ctx); };
  r.rhs = [](P p, C ctx) { return im_j3(sunrise_at(p), SunriseMethod::Quadrature, ctx); };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      validate(sunrise_at(p), ctx);
      return true;
    });
  };
  r.draw = draw_sunrise;
  r.sampler_box = "x in (3.1,9); msq in (0.5,2); d in (2.5,5.5)";
  return r;
}

IdentityRecord id_i3_ode() {
  IdentityRecord r;
  r.id = "ID-I3-ODE";
  r.description =
      "Vertex integral: dI3/ds12 by a 5-point difference of F1_FORMULA values against the "
      "first-order ODE right-hand side built from I3 and three one-loop bubbles.";
  r.citation = "vertex integral: differential equation fixing the periodic constant";
  r.defaults = {{"d", "4.6"}, {"msq", "1"}, {"s12", "-0.4"}, {"s13", "-1.1"}};
  r.lhs = [](P p, C ctx) { return i3_ode_sides(vertex_at(p), ctx).lhs; };
  r.rhs = [](P p, C ctx) { return i3_ode_sides(vertex_at(p), ctx).rhs; };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      const auto k = vertex_at(p);
      return i3_admits(k, VertexMethod::F1Formula, ctx) &&
             abs(k.msq + k.s13 - k.s12) >= Real(1) / 20 && abs(k.msq - k.s12) >= Real(1) / 20 &&
             abs(k.s12 - k.s13) >= Real(1) / 20;
    });
  };
  r.draw = draw_vertex;
  r.sampler_box = "d in {3.4,4.6,5.2}; msq in (0.7,1.5); s12 in (-1.2,0.5); s13 in (-1.2,-0.1)";
  return r;
}

IdentityRecord id_j3_diffeq() {
  IdentityRecord r;
  r.id = "ID-J3-DIFFEQ";
  r.description =
      "Sunrise imaginary part: the d+4 term of the third-order difference equation in d against "
      "the d+2 and d terms (SERIES_2F1 values).";
  r.citation = "sunrise cut: dimensional difference equation";
  r.defaults = {{"x", "5"}, {"msq", "1"}, {"d", "3.4"}};
  r.lhs = [](P p, C ctx) { return im_j3_diffeq_sides(sunrise_at(p), ctx).lhs; };
  r.rhs = [](P p, C ctx) { return im_j3_diffeq_sides(sunrise_at(p), ctx).rhs; };
  r.domain = [](P p, C ctx) {
    return guarded([&] {
      validate(sunrise_at(p), ctx);
      return true;
    });
  };
  r.draw = draw_sunrise;
  r.sampler_box = "x in (3.1,9); msq in (0.5,2); d in (2.5,5.5)";
  return r;
}

std::vector<IdentityRecord> build_registry() {
  return {id_swap(),       id_f1f4(),       id_bailey(),      id_f4tof1(),
          id_kdf(),        id_f1_3f2(),     id_f1_anti(),     id_quad(),
          id_f1_2f1(),     id_classic(),    id_ramanujan(),   id_i2_xmethod(),
          id_i3_xmethod(), id_imj3_xmethod(), id_i3_ode(),    id_j3_diffeq()};
}

void require_complete(const IdentityRecord& rec, const Point& point) {
  for (const auto& [name, value] : point)
    if (!rec.defaults.count(name))
      throw std::invalid_argument(rec.id + ": unknown parameter '" + name + "'");
  for (const auto& [name, value] : rec.defaults) {
    auto it = point.find(name);
    if (it == point.end()) throw std::invalid_argument(rec.id + ": missing parameter '" + name + "'");
    Real check(std::string_view(it->second));  // throws on a malformed literal
  }
}

}  // namespace

const std::vector<IdentityRecord>& registry() {
  static const std::vector<IdentityRecord> records = build_registry();
  return records;
}

const IdentityRecord& find_identity(const std::string& id) {
  for (const auto& r : registry())
    if (r.id == id) return r;
  throw UnknownIdentity("unknown identity '" + id + "'");
}

std::vector<Point> sample_points(const IdentityRecord& rec, int n, std::uint64_t seed,
                                 const PrecisionContext& ctx) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  PrecisionScope scope(ctx.working_digits());
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  const long cap = 1000L * n;
  for (long tries = 0; static_cast<int>(out.size()) < n; ++tries) {
    if (tries >= cap) throw DomainError(rec.id + ": sampler rejected too many draws");
    Point p = rec.draw(rng);
    if (rec.domain(p, ctx)) out.push_back(std::move(p));
  }
  return out;
}

int matched_digits(const Real& a, const Real& b, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  const int w = ctx.working_digits();
  const Real floor_scale = pow10(-w);
  const Real scale = max(max(abs(a), abs(b)), floor_scale);
  const Real rel = abs(a - b) / scale;
  if (rel.is_zero()) return w;
  const long digits = floor(-log10(rel)).to_long();
  return static_cast<int>(std::clamp<long>(digits, 0, w));
}

VerificationReport verify(const std::string& id, const Point& point, const PrecisionContext& ctx,
                          std::uint64_t seed) {
  const IdentityRecord& rec = find_identity(id);
  require_complete(rec, point);
  PrecisionScope scope(ctx.working_digits());
  VerificationReport rep;
  rep.id = rec.id;
  rep.point = point;
  rep.seed = seed;
  rep.ctx_digits = ctx.target_digits();
  rep.lhs_value = NumValue(Real(0), Real(0));
  rep.rhs_value = NumValue(Real(0), Real(0));
  if (!rec.domain(point, ctx)) {
    rep.status = Status::Skip;
    rep.reason = "point outside the validity domain";
    return rep;
  }
  try {
    rep.lhs_value = rec.lhs(point, ctx);
    rep.rhs_value = rec.rhs(point, ctx);
    rep.matched_digits = matched_digits(rep.lhs_value.value, rep.rhs_value.value, ctx);
    if (rec.rhs_alternatives) {
      for (const NamedValue& alt : rec.rhs_alternatives(point, ctx)) {
        const int md = matched_digits(rep.lhs_value.value, alt.value.value, ctx);
        if (md < rep.matched_digits) {
          rep.matched_digits = md;
          rep.rhs_value = alt.value;
          rep.reason = "worst RHS: " + alt.label;
        }
      }
    }
  } catch (const DomainError& e) {
    rep.status = Status::Skip;
    rep.reason = e.what();
    rep.matched_digits = 0;
    return rep;
  } catch (const PoleError& e) {
    rep.status = Status::Skip;
    rep.reason = e.what();
    rep.matched_digits = 0;
    return rep;
  } catch (const EvaluationError& e) {
    rep.status = Status::Fail;
    rep.reason = e.what();
    rep.matched_digits = 0;
    return rep;
  }
  rep.status = rep.matched_digits >= ctx.target_digits() - 5 ? Status::Pass : Status::Fail;
  if (rep.status == Status::Pass && rep.reason.rfind("worst RHS", 0) != 0) rep.reason.clear();
  return rep;
}

std::vector<VerificationReport> sweep(const std::string& id, int n, std::uint64_t seed,
                                      const PrecisionContext& ctx) {
  const IdentityRecord& rec = find_identity(id);
  std::vector<VerificationReport> out;
  for (const Point& p : sample_points(rec, n, seed, ctx)) out.push_back(verify(id, p, ctx, seed));
  return out;
}

namespace {

Real solve_bracketed(const std::function<Real(const Real&)>& f, Real lo, Real hi, int target) {
  Real flo = f(lo), fhi = f(hi);
  if (flo.is_zero()) return lo;
  if (fhi.is_zero()) return hi;
  if (flo.sign() == fhi.sign())
    throw NoBracket("no sign change of RHS - LHS over [" + lo.to_string(8) + ", " +
                    hi.to_string(8) + "]");
  // Bisection to a narrow bracket, then secant steps kept inside it.
  const Real coarse = pow10(-8);
  for (int i = 0; i < 400 && hi - lo > coarse * max(Real(1), abs(lo) + abs(hi)); ++i) {
    Real mid = (lo + hi) / 2;
    Real fm = f(mid);
    if (fm.is_zero()) return mid;
    if (fm.sign() == flo.sign()) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  const Real tol = pow10(-target - 3);
  Real a = lo, fa = flo, b = hi, fb = fhi;
  for (int i = 0; i < 200; ++i) {
    Real c = fb == fa ? (lo + hi) / 2 : b - fb * (b - a) / (fb - fa);
    if (!(c > lo && c < hi)) c = (lo + hi) / 2;
    const Real fc = f(c);
    const Real step = abs(c - b);
    if (fc.is_zero()) return c;
    if (fc.sign() == flo.sign()) {
      lo = c;
      flo = fc;
    } else {
      hi = c;
      fhi = fc;
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    if (step <= tol * max(Real(1), abs(c)) || hi - lo <= tol * max(Real(1), abs(c))) return c;
  }
  return b;
}

}  // namespace

std::vector<PinResult> pin_argument(const std::string& id, const std::vector<Point>& points,
                                    const PrecisionContext& ctx) {
  const IdentityRecord& rec = find_identity(id);
  if (!rec.pin) throw std::invalid_argument(rec.id + " has no pinnable unknown");
  const PinSpec& spec = *rec.pin;
  PrecisionScope scope(ctx.working_digits());
  std::vector<PinResult> out;
  for (const Point& p : points) {
    require_complete(rec, p);
    if (!rec.domain(p, ctx)) throw DomainError(rec.id + ": pin point outside the validity domain");
    const Real lhs = rec.lhs(p, ctx).value;
    auto rhs = spec.rhs_of(p, ctx);
    auto [lo, hi] = spec.bracket(p);
    std::function<Real(const Real&)> f = [&](const Real& u) { return rhs(u).value - lhs; };
    PinResult res;
    res.point = p;
    res.pinned = solve_bracketed(f, lo, hi, ctx.target_digits());
    if (spec.candidate) res.candidate = spec.candidate(p);
    out.push_back(std::move(res));
  }
  return out;
}

RationalFit rational_consistency(const std::vector<Real>& t, const std::vector<Real>& v,
                                 int num_degree, int den_degree, const PrecisionContext& ctx) {
  if (t.size() != v.size()) throw std::invalid_argument("rational fit: size mismatch");
  const int cols = num_degree + 1 + den_degree;
  const int rows = static_cast<int>(t.size());
  if (rows <= cols) throw std::invalid_argument("rational fit needs more points than unknowns");
  PrecisionScope scope(2 * ctx.working_digits());
  // Linearised residual P(t_i) - v_i (q_1 t_i + ... + q_Q t_i^Q) = v_i.
  std::vector<std::vector<Real>> A(rows, std::vector<Real>(cols));
  std::vector<Real> rhs(rows);
  for (int i = 0; i < rows; ++i) {
    Real pw(1);
    for (int j = 0; j <= num_degree; ++j) {
      A[i][j] = pw;
      pw = pw * t[i];
    }
    pw = t[i];
    for (int j = 0; j < den_degree; ++j) {
      A[i][num_degree + 1 + j] = -v[i] * pw;
      pw = pw * t[i];
    }
    rhs[i] = v[i];
  }
  // Column equilibration, then Householder QR.
  std::vector<Real> colscale(cols, Real(0));
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) colscale[j] = max(colscale[j], abs(A[i][j]));
    if (colscale[j].is_zero()) colscale[j] = Real(1);
    for (int i = 0; i < rows; ++i) A[i][j] = A[i][j] / colscale[j];
  }
  for (int j = 0; j < cols; ++j) {
    Real norm(0);
    for (int i = j; i < rows; ++i) norm += A[i][j] * A[i][j];
    norm = sqrt(norm);
    if (norm.is_zero()) continue;
    const Real alpha = A[j][j].sign() > 0 ? -norm : norm;
    std::vector<Real> u(rows, Real(0));
    for (int i = j; i < rows; ++i) u[i] = A[i][j];
    u[j] = u[j] - alpha;
    Real unorm2(0);
    for (int i = j; i < rows; ++i) unorm2 += u[i] * u[i];
    if (unorm2.is_zero()) continue;
    for (int k = j; k < cols; ++k) {
      Real dot(0);
      for (int i = j; i < rows; ++i) dot += u[i] * A[i][k];
      const Real f = 2 * dot / unorm2;
      for (int i = j; i < rows; ++i) A[i][k] = A[i][k] - f * u[i];
    }
    Real dot(0);
    for (int i = j; i < rows; ++i) dot += u[i] * rhs[i];
    const Real f = 2 * dot / unorm2;
    for (int i = j; i < rows; ++i) rhs[i] = rhs[i] - f * u[i];
  }
  std::vector<Real> coef(cols, Real(0));
  for (int j = cols - 1; j >= 0; --j) {
    Real s = rhs[j];
    for (int k = j + 1; k < cols; ++k) s = s - A[j][k] * coef[k];
    coef[j] = A[j][j].is_zero() ? Real(0) : s / A[j][j];
  }
  for (int j = 0; j < cols; ++j) coef[j] = coef[j] / colscale[j];
  Real vmax(0), worst(0);
  for (int i = 0; i < rows; ++i) {
    Real num(0), den(0), pw(1);
    for (int j = 0; j <= num_degree; ++j) {
      num += coef[j] * pw;
      pw = pw * t[i];
    }
    den = Real(1);
    pw = t[i];
    for (int j = 0; j < den_degree; ++j) {
      den += coef[num_degree + 1 + j] * pw;
      pw = pw * t[i];
    }
    worst = max(worst, abs(num / den - v[i]));
    vmax = max(vmax, abs(v[i]));
  }
  RationalFit fit;
  fit.num_degree = num_degree;
  fit.den_degree = den_degree;
  fit.points = rows;
  fit.max_residual = vmax.is_zero() ? worst : worst / vmax;
  fit.consistent = fit.max_residual <= pow10(-ctx.target_digits() + 10);
  return fit;
}

}  // namespace feynhyper
