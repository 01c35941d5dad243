#include "feynhyper/feynman.hpp"

#include <array>
#include <string>

namespace feynhyper {

namespace {

Real mid(const QuadNode& n, const Real& from_lo, const Real& from_hi) {
  return n.from_lower <= n.from_upper ? from_lo : from_hi;
}

void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool near_equal(const Real& a, const Real& b, const PrecisionContext& ctx) {
  return abs(a - b) <= ctx.pole_tolerance() * max(max(abs(a), abs(b)), Real(1));
}

// d-range-free closed forms shared by the vertex formulas, which need them at
// shifted dimensions.
NumValue closed_massive_zero(const Real& msq, const Real& d, const PrecisionContext& ctx) {
  return gamma(2 - d / 2, ctx) * NumValue(pow(msq, d / 2 - 2) / (d / 2 - 1));
}

NumValue closed_massless(const Real& s, const Real& d, const PrecisionContext& ctx) {
  require_domain(s.sign() < 0, "massless bubble needs s < 0");
  NumValue g = gamma(d / 2 - 1, ctx);
  return gamma(2 - d / 2, ctx) * g * g / gamma(d - 2, ctx) * NumValue(pow(-s, d / 2 - 2));
}

NumValue closed_one_mass(const Real& msq, const Real& s, const Real& d,
                         const PrecisionContext& ctx) {
  require_domain(s < msq, "one-mass bubble needs s < m^2");
  return closed_massive_zero(msq, d, ctx) * hyp2f1({Real(1), 2 - d / 2, d / 2}, s / msq, ctx);
}

}  // namespace

// --- bubble --------------------------------------------------------------------

std::string_view to_string(BubbleMethod m) {
  switch (m) {
    case BubbleMethod::F1Form: return "F1_FORM";
    case BubbleMethod::F4Form: return "F4_FORM";
    case BubbleMethod::KdFForm: return "KDF_FORM";
    case BubbleMethod::EqualMass3F2: return "EQUAL_MASS_3F2";
    case BubbleMethod::Quadrature: return "QUADRATURE";
  }
  return "?";
}

std::optional<BubbleMethod> parse_bubble_method(std::string_view name) {
  for (auto m : {BubbleMethod::F1Form, BubbleMethod::F4Form, BubbleMethod::KdFForm,
                 BubbleMethod::EqualMass3F2, BubbleMethod::Quadrature})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

int bubble_sign(const Real& nu_sum, const PrecisionContext& ctx) {
  if (!near_integer(nu_sum, ctx)) return 1;
  return round(nu_sum).to_long() % 2 == 0 ? 1 : -1;
}

void validate(const BubbleKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_domain(k.nu1.sign() > 0 && k.nu2.sign() > 0, "bubble needs nu1, nu2 > 0");
  require_domain(k.d > 2 && k.d < 6, "bubble needs d in (2, 6)");
  require_domain(k.m2sq.sign() > 0, "bubble needs m2sq > 0");
  require_domain(k.m1sq.sign() >= 0, "bubble needs m1sq >= 0");
  // P(x) = s x^2 + (m1sq - m2sq - s) x + m2sq; P(0) = m2sq, P(1) = m1sq.
  const Real lin = k.m1sq - k.m2sq - k.s12;
  if (k.s12.sign() > 0) {
    Real xs = -lin / (2 * k.s12);
    if (xs.sign() > 0 && xs < 1)
      require_domain((k.m2sq - lin * lin / (4 * k.s12)).sign() > 0,
                     "bubble Feynman polynomial not positive (above threshold)");
  }
  if (k.m1sq.is_zero()) {
    // P vanishes linearly at x = 1; integrable for d/2 > nu1 when s12 < m2sq.
    require_domain(k.s12 < k.m2sq, "massless line needs s12 < m2sq");
    require_domain(k.d / 2 > k.nu1, "massless line needs d/2 > nu1");
  }
  const Real b = k.nu1 + k.nu2 - k.d / 2;
  if (near_nonpositive_integer(b, ctx))
    throw PoleError("bubble: nu1+nu2-d/2 is a Gamma pole");
}

std::pair<Real, Real> bubble_xpm(const BubbleKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  const Real x = k.s12 / k.m2sq;
  const Real y = k.m1sq / k.m2sq;
  const Real lam = kallen(Real(1), x, y);
  if (lam.sign() < 0) throw DomainError("bubble roots are complex (Kallen function < 0)");
  const Real r = sqrt(lam);
  const Real sum = 1 + x - y;
  // x- x+ = x; take the root without cancellation first.
  Real xm, xp;
  if (sum.sign() >= 0) {
    xp = (sum + r) / 2;
    xm = xp.is_zero() ? Real(0) : x / xp;
  } else {
    xm = (sum - r) / 2;
    xp = x / xm;
  }
  if (xp < xm) std::swap(xm, xp);
  return {xm, xp};
}

namespace {

struct BubbleParts {
  Real b, nu_sum, x, y;
  int sign;
};

BubbleParts parts(const BubbleKinematics& k, const PrecisionContext& ctx) {
  BubbleParts p;
  p.nu_sum = k.nu1 + k.nu2;
  p.b = p.nu_sum - k.d / 2;
  p.x = k.s12 / k.m2sq;
  p.y = k.m1sq / k.m2sq;
  p.sign = bubble_sign(p.nu_sum, ctx);
  return p;
}

// sign Γ(b) / (Γ(ν1+ν2) (m2^2)^b)
NumValue f1_prefactor(const BubbleKinematics& k, const BubbleParts& p, const PrecisionContext& ctx) {
  return NumValue(Real(p.sign)) * gamma(p.b, ctx) / gamma(p.nu_sum, ctx) *
         NumValue(pow(k.m2sq, -p.b));
}

bool admits_unchecked(const BubbleKinematics& k, BubbleMethod method, const PrecisionContext& ctx) {
  const BubbleParts p = parts(k, ctx);
  switch (method) {
    case BubbleMethod::Quadrature:
      return true;
    case BubbleMethod::F1Form: {
      if (kallen(Real(1), p.x, p.y).sign() < 0) return false;
      auto [xm, xp] = bubble_xpm(k, ctx);
      return appell_f1_admissible({k.nu1, p.b, p.b, p.nu_sum}, xm, xp, ctx);
    }
    case BubbleMethod::F4Form: {
      if (!(sqrt(abs(p.x)) + sqrt(p.y) <= series_radius())) return false;
      const Real e = k.d / 2 - k.nu1;
      if (near_integer(e, ctx)) return false;
      if (p.y.is_zero() && !(e.sign() > 0)) return false;
      return true;
    }
    case BubbleMethod::KdFForm:
      return !near_nonpositive_integer(p.nu_sum, ctx) &&
             kdf_growth_rate(p.x.to_double(), (1 - p.y).to_double()) <= 0.95;
    case BubbleMethod::EqualMass3F2: {
      if (!near_equal(k.m1sq, k.m2sq, ctx)) return false;
      const Real z = k.s12 / (4 * k.m2sq);
      const Real excess = Real(1) / 2 - p.b;  // b1 + b2 - a1 - a2 - a3
      return abs(z) <= series_radius() || (z > series_radius() && z < 1 && excess.sign() > 0);
    }
  }
  return false;
}

NumValue bubble_quadrature(const BubbleKinematics& k, const BubbleParts& p,
                           const PrecisionContext& ctx) {
  const Real lin0 = k.m1sq - k.m2sq - k.s12;  // P'(0)
  const Real lin1 = k.m2sq - k.m1sq - k.s12;  // -P'(1)
  const Real e1 = k.nu1 - 1;
  const Real e2 = k.nu2 - 1;
  EndpointIntegrand f = [&](const QuadNode& n) {
    const Real& u = n.from_lower;
    const Real& v = n.from_upper;
    Real P = n.from_lower <= n.from_upper ? k.m2sq + u * (lin0 + k.s12 * u)
                                          : k.m1sq + v * (lin1 + k.s12 * v);
    if (!(P.sign() > 0)) throw DomainError("bubble Feynman polynomial not positive");
    return pow(u, e1) * pow(v, e2) * pow(P, -p.b);
  };
  NumValue integral = quad_de_endpoint(f, Real(0), Real(1), ctx);
  NumValue pref = NumValue(Real(p.sign)) * gamma(p.b, ctx) / (gamma(k.nu1, ctx) * gamma(k.nu2, ctx));
  return pref * integral;
}

}  // namespace

bool i2_admits(const BubbleKinematics& k, BubbleMethod method, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  try {
    validate(k, ctx);
  } catch (const EvaluationError&) {
    return false;
  }
  return admits_unchecked(k, method, ctx);
}

NumValue i2(const BubbleKinematics& k, BubbleMethod method, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  if (!admits_unchecked(k, method, ctx))
    throw DomainError(std::string("i2: method ") + std::string(to_string(method)) +
                      " not admitted at this point");
  const BubbleParts p = parts(k, ctx);
  switch (method) {
    case BubbleMethod::Quadrature:
      return bubble_quadrature(k, p, ctx);
    case BubbleMethod::F1Form: {
      auto [xm, xp] = bubble_xpm(k, ctx);
      return f1_prefactor(k, p, ctx) * appell_f1({k.nu1, p.b, p.b, p.nu_sum}, xm, xp, ctx);
    }
    case BubbleMethod::KdFForm:
      return f1_prefactor(k, p, ctx) * kdf_f210({p.b, k.nu1, k.nu2}, p.x, 1 - p.y, ctx);
    case BubbleMethod::EqualMass3F2: {
      Hyp3F2Params h{k.nu1, k.nu2, p.b, p.nu_sum / 2, (p.nu_sum + 1) / 2};
      return f1_prefactor(k, p, ctx) * hyp3f2(h, k.s12 / (4 * k.m2sq), ctx);
    }
    case BubbleMethod::F4Form: {
      const Real half_d = k.d / 2;
      const Real e = half_d - k.nu1;
      NumValue first = gamma(e, ctx) * gamma(p.b, ctx) / (gamma(half_d, ctx) * gamma(k.nu2, ctx)) *
                       appell_f4({k.nu1, p.b, half_d, 1 - e}, p.x, p.y, ctx);
      NumValue total = first;
      if (!p.y.is_zero()) {
        NumValue second = NumValue(pow(p.y, e)) * gamma(-e, ctx) / gamma(k.nu1, ctx) *
                          appell_f4({k.nu2, half_d, half_d, 1 + e}, p.x, p.y, ctx);
        total = total + second;
      }
      return NumValue(Real(p.sign) * pow(k.m2sq, -p.b)) * total;
    }
  }
  throw DomainError("i2: unknown method");
}

NumValue i2_special_line(const BubbleKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  require_domain(near_equal(k.s12, k.m1sq - k.m2sq, ctx),
                 "special-line form needs s12 = m1sq - m2sq");
  const BubbleParts p = parts(k, ctx);
  Hyp3F2Params h{k.nu1 / 2, (k.nu1 + 1) / 2, p.b, p.nu_sum / 2, (p.nu_sum + 1) / 2};
  return f1_prefactor(k, p, ctx) * hyp3f2(h, 1 - p.y, ctx);
}

NumValue i2_bubble_closed(const Real& msq, const Real& d, BubbleClosedVariant variant,
                          const Real& s, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_domain(d > 2 && d < 6, "closed bubble needs d in (2, 6)");
  switch (variant) {
    case BubbleClosedVariant::MassiveZeroMomentum:
      require_domain(msq.sign() > 0, "closed bubble needs m^2 > 0");
      return closed_massive_zero(msq, d, ctx);
    case BubbleClosedVariant::Massless:
      return closed_massless(s, d, ctx);
    case BubbleClosedVariant::OneMass:
      require_domain(msq.sign() > 0, "closed bubble needs m^2 > 0");
      return closed_one_mass(msq, s, d, ctx);
  }
  throw DomainError("closed bubble: unknown variant");
}

// --- vertex --------------------------------------------------------------------

std::string_view to_string(VertexMethod m) {
  switch (m) {
    case VertexMethod::F1Formula: return "F1_FORMULA";
    case VertexMethod::Recurrence: return "RECURRENCE";
    case VertexMethod::Quadrature: return "QUADRATURE";
  }
  return "?";
}

std::optional<VertexMethod> parse_vertex_method(std::string_view name) {
  for (auto m : {VertexMethod::F1Formula, VertexMethod::Recurrence, VertexMethod::Quadrature})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

namespace {

void validate_any_d(const VertexKinematics& k, const PrecisionContext& ctx) {
  require_domain(k.msq.sign() > 0, "vertex needs m^2 > 0");
  require_domain(k.d > 2, "vertex needs d > 2");
  require_domain(k.s13.sign() < 0, "vertex needs s13 < 0 (positive Feynman denominator)");
  require_domain(k.s12 < k.msq, "vertex needs s12 < m^2");
  require_domain(!near_equal(k.s12, k.s13, ctx), "vertex needs s12 != s13");
}

bool f1_formula_ok(const VertexKinematics& k, const PrecisionContext& ctx) {
  const Real omega = (k.s12 - k.s13) / k.msq;
  if (!(omega < 1)) return false;
  if (near_nonpositive_integer(2 - k.d / 2, ctx)) return false;
  return appell_f1_admissible({Real(1), Real(1), 2 - k.d / 2, k.d / 2}, omega, k.s12 / k.msq, ctx);
}

NumValue vertex_f1_formula(const VertexKinematics& k, const PrecisionContext& ctx) {
  const Real& d = k.d;
  const Real omega = (k.s12 - k.s13) / k.msq;
  require_domain(omega < 1, "F1_FORMULA needs (s12 - s13)/m^2 < 1");
  NumValue f1 = appell_f1({Real(1), Real(1), 2 - d / 2, d / 2}, omega, k.s12 / k.msq, ctx);
  NumValue g = hyp2f1({Real(1), (d - 2) / 2, d - 2}, omega, ctx);
  NumValue inv_m(1 / k.msq);
  return inv_m * closed_massive_zero(k.msq, d, ctx) * f1 -
         inv_m * closed_massless(k.s13, d, ctx) * g;
}

// ∫_0^1 dx2 (A + B x2)^(-p), written to stay accurate when B is small
// relative to A (including B = 0) and at e = 1 - p = 0.
Real inner_integral(const Real& A, const Real& B, const Real& e) {
  if (B.is_zero()) return pow(A, e - 1);
  const Real u = B / A;
  if (abs(u) < Real(1) / 2) {
    const Real l = log1p(u);
    const Real g = e.is_zero() ? l : expm1(e * l) / e;
    return pow(A, e) * g / B;
  }
  if (e.is_zero()) return (log(A + B) - log(A)) / B;
  return (pow(A + B, e) - pow(A, e)) / (B * e);
}

NumValue vertex_quadrature(const VertexKinematics& k, const PrecisionContext& ctx) {
  const Real p = 3 - k.d / 2;
  const Real e = 1 - p;
  EndpointIntegrand f = [&](const QuadNode& n) {
    const Real& x1 = n.from_lower;
    const Real& delta = n.from_upper;  // 1 - x1
    const Real A = -k.s13 * delta;
    const Real B = k.msq - (k.s12 - k.s13) * delta;
    return pow(x1, e) * inner_integral(A, B, e);
  };
  NumValue integral = quad_de_endpoint(f, Real(0), Real(1), ctx);
  return -gamma(p, ctx) * integral;
}

struct RecCoeffs {
  Real c_zero, c_massless, c_one_mass;  // R = Σ c_i I11_i / (d-2)
};

RecCoeffs rec_coeffs(const VertexKinematics& k) {
  const Real& m = k.msq;
  const Real& s12 = k.s12;
  const Real& s13 = k.s13;
  const Real diff2 = (s12 - s13) * (s12 - s13);
  return {m / (s13 - s12), s13 * (s12 - s13 - 2 * m) / diff2,
          (m * s12 + m * s13 + s12 * s13 - s12 * s12) / diff2};
}

// Inhomogeneous part R(D) of I3(D+2) = c(D) I3(D) + R(D).
NumValue rec_inhomogeneous(const VertexKinematics& k, const Real& D, const PrecisionContext& ctx) {
  const RecCoeffs c = rec_coeffs(k);
  NumValue r = NumValue(c.c_zero) * closed_massive_zero(k.msq, D, ctx) +
               NumValue(c.c_massless) * closed_massless(k.s13, D, ctx) +
               NumValue(c.c_one_mass) * closed_one_mass(k.msq, k.s12, D, ctx);
  return r / NumValue(D - 2);
}

NumValue vertex_recurrence(const VertexKinematics& k, const PrecisionContext& ctx) {
  const Real sigma = vertex_sigma(k);
  const Real half_d = k.d / 2;
  constexpr long kCap = 2000;
  constexpr long kRatioStart = 10;
  const Real limit(Real(9) / 10);
  const Real tiny = pow10(-ctx.working_digits());
  NumValue sum(0);
  Real weight(1);  // (d/2)_k σ^-k
  Real prev_abs;
  Real worst_ratio(0);
  for (long n = 0; n < kCap; ++n) {
    if (n > 0) weight = weight * (half_d + (n - 1)) / sigma;
    NumValue t = NumValue(weight) * rec_inhomogeneous(k, k.d + 2 * n, ctx);
    sum = sum + t;
    const Real at = abs(t.value);
    if (n > 0 && !prev_abs.is_zero()) {
      const Real ratio = at / prev_abs;
      if (n > kRatioStart) {
        if (ratio > limit)
          throw NonConvergence("RECURRENCE ratio test failed at shell " + std::to_string(n) +
                               " (ratio " + ratio.to_string(6) + ")");
        worst_ratio = max(worst_ratio, ratio);
        const Real tail = at * worst_ratio / (1 - worst_ratio);
        if (tail <= tiny * abs(sum.value)) {
          NumValue total = NumValue(-(k.d - 2) / (2 * sigma)) * NumValue(sum.value, sum.abs_err + tail);
          return total;
        }
      }
    }
    prev_abs = at;
  }
  throw NonConvergence("RECURRENCE did not converge within 2000 shells");
}

}  // namespace

void validate(const VertexKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_domain(k.d < 6, "vertex needs d in (2, 6)");
  validate_any_d(k, ctx);
}

Real vertex_sigma(const VertexKinematics& k) {
  const Real diff = k.s12 - k.s13;
  return k.msq * k.s13 * (diff - k.msq) / (diff * diff);
}

Real recurrence_rate(const VertexKinematics& k) {
  return max(k.msq, abs(k.s13) / 4) / abs(vertex_sigma(k));
}

bool i3_admits(const VertexKinematics& k, VertexMethod method, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  try {
    validate(k, ctx);
  } catch (const EvaluationError&) {
    return false;
  }
  switch (method) {
    case VertexMethod::Quadrature:
      return true;
    case VertexMethod::F1Formula:
      return f1_formula_ok(k, ctx);
    case VertexMethod::Recurrence:
      // Every shifted dimension d+2k must dodge the Γ(2-d/2) poles.
      return !near_integer(k.d / 2, ctx) && recurrence_rate(k) <= Real(8) / 10;
  }
  return false;
}

NumValue i3(const VertexKinematics& k, VertexMethod method, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  switch (method) {
    case VertexMethod::Quadrature:
      return vertex_quadrature(k, ctx);
    case VertexMethod::F1Formula:
      return vertex_f1_formula(k, ctx);
    case VertexMethod::Recurrence:
      if (near_integer(k.d / 2, ctx))
        throw PoleError("RECURRENCE needs d away from even integers");
      return vertex_recurrence(k, ctx);
  }
  throw DomainError("i3: unknown method");
}

NumValue i3_sigma_form(const VertexKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  const Real& d = k.d;
  const Real& m = k.msq;
  const Real& s12 = k.s12;
  const Real& s13 = k.s13;
  const Real sigma = vertex_sigma(k);
  const Real den = s13 - s12 + m;
  require_domain(!den.is_zero(), "sigma form needs s13 - s12 + m^2 != 0");
  const NumValue zero = closed_massive_zero(m, d, ctx);
  const NumValue massless = closed_massless(s13, d, ctx);
  const Real c1 = -((m - s12) * s12 + (m + s12) * s13) / (2 * s13 * den * (s12 - m));
  const NumValue f1 = appell_f1({(d - 2) / 2, Real(1) / 2, Real(1), d / 2},
                                -4 * m * s12 / ((s12 - m) * (s12 - m)), -m / sigma, ctx);
  const Real c2 = (s13 - s12) / (2 * den * s13);
  const Real c3 = (s12 - s13 - 2 * m) / (2 * m * den);
  return NumValue(c1) * zero * f1 +
         NumValue(c2) * zero * hyp2f1({Real(1), (d - 2) / 2, d / 2}, -m / sigma, ctx) +
         NumValue(c3) * massless * hyp2f1({Real(1), (d - 2) / 2, (d - 1) / 2}, s13 / (4 * sigma), ctx);
}

NumValue i3_recurrence_residual(const VertexKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  VertexKinematics up = k;
  up.d = k.d + 2;
  require_domain(f1_formula_ok(k, ctx) && f1_formula_ok(up, ctx),
                 "recurrence residual needs F1_FORMULA at d and d+2");
  const NumValue lower = vertex_f1_formula(k, ctx);
  const NumValue upper = vertex_f1_formula(up, ctx);
  const Real diff = k.s12 - k.s13;
  const Real c = 2 * k.msq * k.s13 * (k.s12 - k.msq - k.s13) / (diff * diff * (k.d - 2));
  const NumValue rhs = NumValue(c) * lower + rec_inhomogeneous(k, k.d, ctx);
  NumValue r = upper - rhs;
  return NumValue(abs(r.value) / abs(upper.value), r.abs_err / abs(upper.value));
}

ResidualSides i3_ode_sides(const VertexKinematics& k, const PrecisionContext& ctx,
                           const OdeResidualOptions& opts) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  const Real h = opts.step ? *opts.step : pow10(-ctx.working_digits() / 5);
  // Stencil values are computed with the working precision as target so the
  // finite difference is not limited by the evaluator tolerance.
  const PrecisionContext fine = ctx.with_target(ctx.working_digits());
  std::array<Real, 4> f;
  const std::array<int, 4> offsets{-2, -1, 1, 2};
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    VertexKinematics kk = k;
    kk.s12 = k.s12 + offsets[i] * h;
    validate(kk, ctx);
    require_domain(f1_formula_ok(kk, fine), "ODE stencil leaves the F1_FORMULA domain");
    f[i] = vertex_f1_formula(kk, fine).value;
  }
  Real deriv;
  {
    PrecisionScope wide(fine.working_digits());
    deriv = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h);
  }
  require_domain(f1_formula_ok(k, fine), "ODE point outside the F1_FORMULA domain");
  const NumValue I = vertex_f1_formula(k, fine);
  const Real& d = k.d;
  const Real& m = k.msq;
  const Real& s12 = k.s12;
  const Real& s13 = k.s13;
  const Real w = m + s13 - s12;
  require_domain(!w.is_zero(), "ODE needs m^2 + s13 - s12 != 0");
  const Real scale = opts.bubble_scale;
  const Real one_mass = scale * closed_one_mass(m, s12, d, fine).value;
  const Real zero = scale * closed_massive_zero(m, d, fine).value;
  const Real massless = scale * closed_massless(s13, d, fine).value;
  const Real rhs = ((d - 2) * (s13 - s12 + 2 * m) - 2 * m) / (2 * w * (s13 - s12)) * I.value +
                   (d - 3) * (m + s13 - 2 * s12) / ((m - s12) * w * (s12 - s13)) * one_mass +
                   (d - 2) / (2 * (m - s12) * w) * zero -
                   (d - 3) / (w * (s12 - s13)) * massless;
  return {NumValue(deriv), NumValue(rhs)};
}

NumValue i3_ode_residual(const VertexKinematics& k, const PrecisionContext& ctx,
                         const OdeResidualOptions& opts) {
  PrecisionScope scope(ctx.working_digits());
  const ResidualSides sides = i3_ode_sides(k, ctx, opts);
  return NumValue(abs(sides.lhs.value - sides.rhs.value));
}

// --- sunrise -------------------------------------------------------------------

std::string_view to_string(SunriseMethod m) {
  switch (m) {
    case SunriseMethod::Series2F1: return "SERIES_2F1";
    case SunriseMethod::Quadrature: return "QUADRATURE";
  }
  return "?";
}

std::optional<SunriseMethod> parse_sunrise_method(std::string_view name) {
  for (auto m : {SunriseMethod::Series2F1, SunriseMethod::Quadrature})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

namespace {

void validate_any_d(const SunriseKinematics& k, const PrecisionContext& ctx) {
  require_domain(k.x > 3, "sunrise needs x > 3");
  require_domain(k.msq.sign() > 0, "sunrise needs m^2 > 0");
  require_domain(k.d > 2, "sunrise needs d > 2");
  if (near_nonpositive_integer(k.d / 2, ctx) || near_nonpositive_integer(k.d - 1, ctx))
    throw PoleError("sunrise: d/2 or d-1 at a Gamma pole");
}

NumValue sunrise_series(const SunriseKinematics& k, const PrecisionContext& ctx) {
  const Real& x = k.x;
  const Real& d = k.d;
  const Real x2 = x * x;
  const Real z = sunrise_z(x);
  const Real pref = -4 * pi() * pi() * sqrt(Real(3)) * pow(k.msq, d - 3) / (x2 + 3) *
                    pow((x2 - 9) * (x2 - 9) / 27, (d - 2) / 2);
  return NumValue(pref) / gamma(d - 1, ctx) *
         hyp2f1({Real(1) / 3, Real(2) / 3, d / 2}, z, ctx);
}

NumValue sunrise_quadrature(const SunriseKinematics& k, const PrecisionContext& ctx) {
  const Real& d = k.d;
  const Real m = sqrt(k.msq);
  const Real q = k.x * m;
  const Real r = (q + m) * (q - 3 * m) / ((q - m) * (q + 3 * m));
  const Real s = (q + m) * (q - 3 * m) / (4 * k.msq);
  const Real e = (d - 3) / 2;
  EndpointIntegrand f = [&](const QuadNode& n) {
    const Real& b = n.from_lower;
    const Real& c = n.from_upper;
    Real one_minus_rb = mid(n, 1 - r * b, (1 - r) + r * c);
    return pow(b * c * one_minus_rb, e) / sqrt(1 + s * b);
  };
  NumValue integral = quad_de_endpoint(f, Real(0), Real(1), ctx);
  NumValue g = gamma((d - 2) / 2, ctx) / gamma(d - 2, ctx);
  const Real base = (q - m) * (q + 3 * m) * (q + m) * (q + m) * (q - 3 * m) * (q - 3 * m);
  const Real pref = -pi() / pow(q * q, d / 2 - 1) * (q - 3 * m) * (q + m) / (2 * m) * pow(base, e);
  return NumValue(pref) * g * g * integral;
}

}  // namespace

void validate(const SunriseKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  require_domain(k.d < 6, "sunrise needs d in (2, 6)");
  validate_any_d(k, ctx);
}

Real sunrise_z(const Real& x) {
  const Real x2 = x * x;
  const Real a = x2 - 9;
  const Real b = x2 + 3;
  return x2 * a * a / (b * b * b);
}

NumValue im_j3(const SunriseKinematics& k, SunriseMethod method, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  validate(k, ctx);
  switch (method) {
    case SunriseMethod::Series2F1:
      return sunrise_series(k, ctx);
    case SunriseMethod::Quadrature:
      return sunrise_quadrature(k, ctx);
  }
  throw DomainError("im_j3: unknown method");
}

namespace {

struct DiffeqTerms {
  Real t4, t2, t0;
};

DiffeqTerms diffeq_terms(const SunriseKinematics& k, const PrecisionContext& ctx) {
  validate(k, ctx);
  const Real& x = k.x;
  const Real& d = k.d;
  const Real x2 = x * x;
  const Real m4 = k.msq * k.msq;
  SunriseKinematics k2 = k, k4 = k;
  k2.d = d + 2;
  k4.d = d + 4;
  validate_any_d(k4, ctx);
  const Real j0 = sunrise_series(k, ctx).value;
  const Real j2 = sunrise_series(k2, ctx).value;
  const Real j4 = sunrise_series(k4, ctx).value;
  return {12 * x2 * (d + 1) * (d - 1) * (3 * d + 4) * (3 * d + 2) * j4,
          4 * m4 * (x2 - 3) * (x2 * x2 - 42 * x2 + 9) * (d - 1) * d * j2,
          4 * m4 * m4 * (x2 - 1) * (x2 - 1) * (x2 - 9) * (x2 - 9) * j0};
}

}  // namespace

ResidualSides im_j3_diffeq_sides(const SunriseKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  const DiffeqTerms t = diffeq_terms(k, ctx);
  return {NumValue(t.t4), NumValue(t.t2 + t.t0)};
}

NumValue im_j3_diffeq_residual(const SunriseKinematics& k, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.working_digits());
  const DiffeqTerms t = diffeq_terms(k, ctx);
  const Real scale = max(max(abs(t.t4), abs(t.t2)), abs(t.t0));
  return NumValue(abs(t.t4 - t.t2 - t.t0) / scale);
}

}  // namespace feynhyper
