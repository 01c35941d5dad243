#include "feynhyper/hyperfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace feynhyper {

namespace {

thread_local EvaluatorTrace g_trace;

void require_not_pole(const Real& c, const char* name, const PrecisionContext& ctx) {
  if (near_nonpositive_integer(c, ctx))
    throw PoleError(std::string(name) + " is a non-positive integer: " + c.to_string(20));
}

}  // namespace

Real series_radius() { return Real(95) / 100; }

TraceScope::TraceScope() : saved_(g_trace) { g_trace = EvaluatorTrace{}; }

TraceScope::~TraceScope() {
  g_trace.hyp2f1 += saved_.hyp2f1;
  g_trace.hyp3f2 += saved_.hyp3f2;
  g_trace.appell_f1 += saved_.appell_f1;
  g_trace.appell_f1_onefold += saved_.appell_f1_onefold;
  g_trace.appell_f4 += saved_.appell_f4;
  g_trace.kdf += saved_.kdf;
}

const EvaluatorTrace& TraceScope::counts() const { return g_trace; }

// --- Gauss 2F1 ---------------------------------------------------------------

std::string_view to_string(Gauss2F1Map m) {
  switch (m) {
    case Gauss2F1Map::Identity: return "z";
    case Gauss2F1Map::Pfaff: return "z/(z-1)";
    case Gauss2F1Map::OneMinus: return "1-z";
    case Gauss2F1Map::Inverse: return "1/z";
    case Gauss2F1Map::InverseOneMinus: return "1/(1-z)";
    case Gauss2F1Map::OneMinusInverse: return "(z-1)/z";
  }
  return "?";
}

NumValue hyp2f1_series(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "2F1 lower parameter c", ctx);
  if (!(abs(z) < 1)) throw DomainError("2F1 series needs |z| < 1, got z = " + z.to_string(20));
  Real t(1);
  return sum_series_checked(
      [&](long n) {
        if (n > 0) {
          const long k = n - 1;
          t = t * (p.a + k) * (p.b + k) / ((p.c + k) * n) * z;
        }
        return t;
      },
      ctx, "2F1 series");
}

namespace {

struct MapCandidate {
  Gauss2F1Map map;
  Real image;
};

std::optional<MapCandidate> choose_2f1_map(const Gauss2F1Params& p, const Real& z,
                                           const PrecisionContext& ctx) {
  const bool cab_integer = near_integer(p.c - p.a - p.b, ctx);
  const bool ab_integer = near_integer(p.a - p.b, ctx);
  std::optional<MapCandidate> best;
  Real best_mod;
  auto consider = [&](Gauss2F1Map m, const Real& image, bool allowed) {
    if (!allowed) return;
    Real mod = abs(image);
    if (!(mod < 1)) return;
    if (!best || mod < best_mod) {
      best = MapCandidate{m, image};
      best_mod = mod;
    }
  };
  // Order fixes the tie-break: identity first, then z/(z-1).
  consider(Gauss2F1Map::Identity, z, true);
  consider(Gauss2F1Map::Pfaff, z / (z - 1), true);
  const bool positive = z.sign() > 0;
  consider(Gauss2F1Map::OneMinus, 1 - z, positive && !cab_integer);
  consider(Gauss2F1Map::Inverse, positive ? Real(2) : Real(1) / z, !positive && !ab_integer);
  consider(Gauss2F1Map::InverseOneMinus, 1 / (1 - z), !positive && !ab_integer);
  consider(Gauss2F1Map::OneMinusInverse, positive ? (z - 1) / z : Real(2),
           positive && !cab_integer);
  return best;
}

NumValue series(const Real& a, const Real& b, const Real& c, const Real& z,
                const PrecisionContext& ctx) {
  return hyp2f1_series({a, b, c}, z, ctx);
}

}  // namespace

Gauss2F1Map hyp2f1_route(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "2F1 lower parameter c", ctx);
  if (!(z < 1)) throw DomainError("2F1 needs z < 1, got z = " + z.to_string(20));
  if (abs(z) <= Real(1) / 2) return Gauss2F1Map::Identity;
  auto m = choose_2f1_map(p, z, ctx);
  if (!m) throw PoleError("2F1: every admissible transformation hits a Gamma pole");
  return m->map;
}

NumValue hyp2f1(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx) {
  ++g_trace.hyp2f1;
  PrecisionScope scope(ctx.working_digits());
  const Gauss2F1Map route = hyp2f1_route(p, z, ctx);
  const Real& a = p.a;
  const Real& b = p.b;
  const Real& c = p.c;
  const NumValue gc = gamma(c, ctx);
  switch (route) {
    case Gauss2F1Map::Identity:
      return series(a, b, c, z, ctx);
    case Gauss2F1Map::Pfaff: {
      Real w = z / (z - 1);
      return pow(NumValue(1 - z), -a) * series(a, c - b, c, w, ctx);
    }
    case Gauss2F1Map::OneMinus: {
      Real w = 1 - z;
      NumValue A = gc * gamma(c - a - b, ctx) * NumValue(rgamma(c - a, ctx) * rgamma(c - b, ctx));
      NumValue B = gc * gamma(a + b - c, ctx) * NumValue(rgamma(a, ctx) * rgamma(b, ctx));
      NumValue r = A * series(a, b, a + b - c + 1, w, ctx);
      if (!B.value.is_zero())
        r = r + B * NumValue(pow(w, c - a - b)) * series(c - a, c - b, c - a - b + 1, w, ctx);
      return r;
    }
    case Gauss2F1Map::OneMinusInverse: {
      Real w = 1 - 1 / z;
      NumValue A = gc * gamma(c - a - b, ctx) * NumValue(rgamma(c - a, ctx) * rgamma(c - b, ctx));
      NumValue B = gc * gamma(a + b - c, ctx) * NumValue(rgamma(a, ctx) * rgamma(b, ctx));
      NumValue r = A * NumValue(pow(z, -a)) * series(a, a - c + 1, a + b - c + 1, w, ctx);
      if (!B.value.is_zero())
        r = r + B * NumValue(pow(1 - z, c - a - b) * pow(z, a - c)) *
                    series(c - a, 1 - a, c - a - b + 1, w, ctx);
      return r;
    }
    case Gauss2F1Map::Inverse: {
      Real w = 1 / z;
      Real mz = -z;
      NumValue A = gc * gamma(b - a, ctx) * NumValue(rgamma(b, ctx) * rgamma(c - a, ctx));
      NumValue B = gc * gamma(a - b, ctx) * NumValue(rgamma(a, ctx) * rgamma(c - b, ctx));
      NumValue r(0);
      if (!A.value.is_zero())
        r = A * NumValue(pow(mz, -a)) * series(a, a - c + 1, a - b + 1, w, ctx);
      if (!B.value.is_zero())
        r = r + B * NumValue(pow(mz, -b)) * series(b, b - c + 1, b - a + 1, w, ctx);
      return r;
    }
    case Gauss2F1Map::InverseOneMinus: {
      Real omz = 1 - z;
      Real w = 1 / omz;
      NumValue A = gc * gamma(b - a, ctx) * NumValue(rgamma(b, ctx) * rgamma(c - a, ctx));
      NumValue B = gc * gamma(a - b, ctx) * NumValue(rgamma(a, ctx) * rgamma(c - b, ctx));
      NumValue r(0);
      if (!A.value.is_zero())
        r = A * NumValue(pow(omz, -a)) * series(a, c - b, a - b + 1, w, ctx);
      if (!B.value.is_zero())
        r = r + B * NumValue(pow(omz, -b)) * series(b, c - a, b - a + 1, w, ctx);
      return r;
    }
  }
  throw DomainError("2F1: unreachable route");
}

// --- 3F2 ---------------------------------------------------------------------

NumValue hyp3f2(const Hyp3F2Params& p, const Real& z, const PrecisionContext& ctx) {
  ++g_trace.hyp3f2;
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.b1, "3F2 lower parameter b1", ctx);
  require_not_pole(p.b2, "3F2 lower parameter b2", ctx);
  if (abs(z) > 1) throw DomainError("3F2 needs |z| <= 1, got z = " + z.to_string(20));
  const Real excess = p.b1 + p.b2 - p.a1 - p.a2 - p.a3;
  const bool slow_ok = z > series_radius() && z < 1 && excess.sign() > 0;
  if (!(abs(z) <= series_radius()) && !slow_ok)
    throw DomainError("3F2 outside the series domain at z = " + z.to_string(20));
  Real t(1);
  return sum_series_checked(
      [&](long n) {
        if (n > 0) {
          const long k = n - 1;
          t = t * (p.a1 + k) * (p.a2 + k) * (p.a3 + k) / ((p.b1 + k) * (p.b2 + k) * n) * z;
        }
        return t;
      },
      ctx, "3F2 series");
}

// --- Appell F1 ---------------------------------------------------------------

std::string_view to_string(F1Route r) {
  switch (r) {
    case F1Route::Series: return "series";
    case F1Route::Euler: return "euler";
    case F1Route::PfaffSeries: return "pfaff+series";
    case F1Route::PfaffEuler: return "pfaff+euler";
  }
  return "?";
}

namespace {

bool in_polydisc(const Real& w, const Real& z) {
  return abs(w) <= series_radius() && abs(z) <= series_radius();
}

bool euler_ok(const AppellF1Params& p, const Real& w, const Real& z) {
  return p.c > p.a && p.a.sign() > 0 && w < 1 && z < 1;
}

bool pfaff_ok(const AppellF1Params& p, const Real& w, const Real& z) {
  if (!(w < 1 && z < 1)) return false;
  Real wi = w / (w - 1);
  Real zi = z / (z - 1);
  return in_polydisc(wi, zi) || euler_ok({p.c - p.a, p.b, p.bp, p.c}, wi, zi);
}

NumValue f1_series_impl(const AppellF1Params& p, const Real& w, const Real& z,
                        const PrecisionContext& ctx) {
  DoubleSeriesSteps steps{
      Real(1),
      [&](long k, long l, const Real& t) {
        return t * (p.a + (k + l)) * (p.bp + l) / ((p.c + (k + l)) * (l + 1)) * z;
      },
      [&](long k, const Real& t) { return t * (p.a + k) * (p.b + k) / ((p.c + k) * (k + 1)) * w; }};
  SeriesResult r = sum_double_series(steps, ctx);
  if (!r.converged) throw NonConvergence("F1 double series did not converge");
  return r.value;
}

// 1 - s*u evaluated from whichever endpoint distance is smaller.
Real one_minus(const Real& s, const QuadNode& node) {
  if (node.from_lower <= node.from_upper) return 1 - s * node.from_lower;
  return (1 - s) + s * node.from_upper;
}

NumValue f1_euler_impl(const AppellF1Params& p, const Real& w, const Real& z,
                       const PrecisionContext& ctx) {
  const Real e_lo = p.a - 1;
  const Real e_hi = p.c - p.a - 1;
  EndpointIntegrand f = [&](const QuadNode& n) {
    return pow(n.from_lower, e_lo) * pow(n.from_upper, e_hi) * pow(one_minus(w, n), -p.b) *
           pow(one_minus(z, n), -p.bp);
  };
  NumValue integral = quad_de_endpoint(f, Real(0), Real(1), ctx);
  NumValue norm = gamma(p.c, ctx) / (gamma(p.a, ctx) * gamma(p.c - p.a, ctx));
  return norm * integral;
}

}  // namespace

NumValue appell_f1_series(const AppellF1Params& p, const Real& w, const Real& z,
                          const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "F1 lower parameter c", ctx);
  if (!in_polydisc(w, z)) throw DomainError("F1 series needs max(|w|,|z|) <= 0.95");
  return f1_series_impl(p, w, z, ctx);
}

NumValue appell_f1_euler(const AppellF1Params& p, const Real& w, const Real& z,
                         const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "F1 lower parameter c", ctx);
  if (!euler_ok(p, w, z)) throw DomainError("F1 Euler integral needs c > a > 0, w < 1, z < 1");
  return f1_euler_impl(p, w, z, ctx);
}

NumValue appell_f1_pfaff(const AppellF1Params& p, const Real& w, const Real& z,
                         const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "F1 lower parameter c", ctx);
  if (!pfaff_ok(p, w, z)) throw DomainError("F1 Pfaff image not reachable");
  Real wi = w / (w - 1);
  Real zi = z / (z - 1);
  AppellF1Params q{p.c - p.a, p.b, p.bp, p.c};
  NumValue image = in_polydisc(wi, zi) ? f1_series_impl(q, wi, zi, ctx) : f1_euler_impl(q, wi, zi, ctx);
  return NumValue(pow(1 - w, -p.b) * pow(1 - z, -p.bp)) * image;
}

bool appell_f1_admissible(const AppellF1Params& p, const Real& w, const Real& z,
                          const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  if (near_nonpositive_integer(p.c, ctx)) return false;
  return in_polydisc(w, z) || euler_ok(p, w, z) || pfaff_ok(p, w, z);
}

F1Evaluation appell_f1_routed(const AppellF1Params& p, const Real& w, const Real& z,
                              const PrecisionContext& ctx) {
  ++g_trace.appell_f1;
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c, "F1 lower parameter c", ctx);
  if (in_polydisc(w, z)) return {f1_series_impl(p, w, z, ctx), F1Route::Series};
  if (euler_ok(p, w, z)) return {f1_euler_impl(p, w, z, ctx), F1Route::Euler};
  if (pfaff_ok(p, w, z)) {
    Real wi = w / (w - 1);
    Real zi = z / (z - 1);
    const F1Route route = in_polydisc(wi, zi) ? F1Route::PfaffSeries : F1Route::PfaffEuler;
    return {appell_f1_pfaff(p, w, z, ctx), route};
  }
  throw DomainError("F1: no route admits (w, z) = (" + w.to_string(12) + ", " + z.to_string(12) +
                    ")");
}

NumValue appell_f1(const AppellF1Params& p, const Real& w, const Real& z,
                   const PrecisionContext& ctx) {
  return appell_f1_routed(p, w, z, ctx).value;
}

NumValue appell_f1_onefold(const Real& d, const Real& x, const Real& y,
                           const PrecisionContext& ctx) {
  ++g_trace.appell_f1_onefold;
  PrecisionScope scope(ctx.working_digits());
  if (!(d > 2)) throw DomainError("one-fold F1 representation needs d > 2");
  if (!(x < 1 && y < 1)) throw DomainError("one-fold F1 representation needs x < 1, y < 1");
  const Real e = d / 2 - 2;
  EndpointIntegrand f = [&](const QuadNode& n) {
    return pow(n.from_upper * one_minus(y, n), e) / one_minus(x, n);
  };
  NumValue integral = quad_de_endpoint(f, Real(0), Real(1), ctx);
  return NumValue((d - 2) / 2) * integral;
}

// --- Appell F4 ---------------------------------------------------------------

NumValue appell_f4(const AppellF4Params& p, const Real& x, const Real& y,
                   const PrecisionContext& ctx) {
  ++g_trace.appell_f4;
  PrecisionScope scope(ctx.working_digits());
  require_not_pole(p.c1, "F4 lower parameter c1", ctx);
  require_not_pole(p.c2, "F4 lower parameter c2", ctx);
  if (!(sqrt(abs(x)) + sqrt(abs(y)) <= series_radius()))
    throw DomainError("F4 needs sqrt|x| + sqrt|y| <= 0.95");
  DoubleSeriesSteps steps{
      Real(1),
      [&](long k, long l, const Real& t) {
        const long n = k + l;
        return t * (p.a + n) * (p.b + n) / ((p.c2 + l) * (l + 1)) * y;
      },
      [&](long k, const Real& t) { return t * (p.a + k) * (p.b + k) / ((p.c1 + k) * (k + 1)) * x; }};
  SeriesResult r = sum_double_series(steps, ctx);
  if (!r.converged) throw NonConvergence("F4 double series did not converge");
  return r.value;
}

// --- Kampé de Fériet ---------------------------------------------------------

double kdf_growth_rate(double x, double y) {
  const double ax = std::fabs(x);
  const double ay = std::fabs(y);
  double best = -std::numeric_limits<double>::infinity();
  constexpr int kSteps = 4000;
  // Shell n, direction k = kappa n: log|term| / n -> phi(kappa) by Stirling.
  for (int i = 0; i <= kSteps; ++i) {
    const double kappa = static_cast<double>(i) / kSteps;
    const double lambda = 1.0 - kappa;
    auto xlogx = [](double t) { return t > 0 ? t * std::log(t) : 0.0; };
    double phi = -xlogx(1.0 + kappa) - xlogx(lambda);
    if (kappa > 0) phi += ax > 0 ? kappa * std::log(ax) : -std::numeric_limits<double>::infinity();
    if (lambda > 0) phi += ay > 0 ? lambda * std::log(ay) : -std::numeric_limits<double>::infinity();
    best = std::max(best, phi);
  }
  return std::exp(best);
}


NumValue kdf_f210(const KdFParams& p, const Real& x, const Real& y, const PrecisionContext& ctx) {
  ++g_trace.kdf;
  PrecisionScope scope(ctx.working_digits());
  const Real s = p.nu1 + p.nu2;
  require_not_pole(s, "KdF lower parameter nu1+nu2", ctx);
  if (!(kdf_growth_rate(x.to_double(), y.to_double()) <= 0.95))
    throw DomainError("KdF series outside its admitted domain (growth rate > 0.95)");
  DoubleSeriesSteps steps{
      Real(1),
      [&](long k, long l, const Real& t) {
        const long n = k + l;
        return t * (p.alpha + n) * (p.nu1 + n) / ((s + (2 * k + l)) * (l + 1)) * y;
      },
      [&](long k, const Real& t) {
        return t * (p.alpha + k) * (p.nu1 + k) * (p.nu2 + k) /
               ((s + 2 * k) * (s + (2 * k + 1)) * (k + 1)) * x;
      }};
  SeriesResult r = sum_double_series(steps, ctx);
  if (!r.converged) throw NonConvergence("KdF double series did not converge");
  return r.value;
}

}  // namespace feynhyper
