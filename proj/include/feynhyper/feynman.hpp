#pragma once

// One- and two-loop integrals: the bubble I_{nu1 nu2}^{(d)}, the vertex
// I_3^{(d)}(0,m^2,0;0,s13,s12) and Im J_3^{(d)} of the equal-mass sunrise,
// each with a quadrature oracle and hypergeometric closed forms.

#include <optional>
#include <string_view>
#include <utility>

#include "feynhyper/hyperfun.hpp"

namespace feynhyper {

// --- bubble --------------------------------------------------------------------

struct BubbleKinematics {
  Real nu1, nu2;
  Real d;
  Real m1sq, m2sq;
  Real s12;
};

enum class BubbleMethod { F1Form, F4Form, KdFForm, EqualMass3F2, Quadrature };

std::string_view to_string(BubbleMethod m);
std::optional<BubbleMethod> parse_bubble_method(std::string_view name);

/// Throws DomainError/PoleError unless the type invariants hold: nu > 0,
/// d in (2,6), m2sq > 0, m1sq >= 0, the Feynman polynomial positive on [0,1]
/// and nu1+nu2-d/2 away from the Gamma poles.
void validate(const BubbleKinematics& k, const PrecisionContext& ctx);

/// (x-, x+) for x = s12/m2sq, y = m1sq/m2sq. DomainError when Λ(1,x,y) < 0.
std::pair<Real, Real> bubble_xpm(const BubbleKinematics& k, const PrecisionContext& ctx);

/// Whether `method` is admitted at k (type invariants included).
bool i2_admits(const BubbleKinematics& k, BubbleMethod method, const PrecisionContext& ctx);

NumValue i2(const BubbleKinematics& k, BubbleMethod method, const PrecisionContext& ctx);

/// The 3F2 form valid on the line s12 = m1sq - m2sq, where x+ = -x-.
/// DomainError off that line.
NumValue i2_special_line(const BubbleKinematics& k, const PrecisionContext& ctx);

/// Overall sign (-1)^(nu1+nu2): applied when nu1+nu2 is an integer, and
/// taken as +1 otherwise so that every method stays real.
int bubble_sign(const Real& nu_sum, const PrecisionContext& ctx);

enum class BubbleClosedVariant {
  MassiveZeroMomentum,  // I11(0, m^2; 0)
  Massless,             // I11(0, 0; s), s < 0
  OneMass,              // I11(0, m^2; s), s < m^2
};

/// Closed forms of I_11 used as inputs of the vertex formulas. `msq` is
/// ignored for Massless; `s` is ignored for MassiveZeroMomentum.
NumValue i2_bubble_closed(const Real& msq, const Real& d, BubbleClosedVariant variant,
                          const Real& s, const PrecisionContext& ctx);

// --- vertex --------------------------------------------------------------------

struct VertexKinematics {
  Real msq;
  Real s12, s13;
  Real d;
};

enum class VertexMethod { F1Formula, Recurrence, Quadrature };

std::string_view to_string(VertexMethod m);
std::optional<VertexMethod> parse_vertex_method(std::string_view name);

/// Throws unless m^2 > 0, d in (2,6), s13 < 0, s12 < m^2 and s12 != s13.
/// (s13 < 0 together with s12 < m^2 is exactly positivity of the
/// Feynman-parameter denominator on the unit square.)
void validate(const VertexKinematics& k, const PrecisionContext& ctx);

/// σ = m^2 s13 (s12 - s13 - m^2) / (s12 - s13)^2.
Real vertex_sigma(const VertexKinematics& k);

/// Asymptotic term ratio of the dimension-shift sum, max(m^2, |s13|/4)/|σ|.
Real recurrence_rate(const VertexKinematics& k);

bool i3_admits(const VertexKinematics& k, VertexMethod method, const PrecisionContext& ctx);

NumValue i3(const VertexKinematics& k, VertexMethod method, const PrecisionContext& ctx);

/// Closed form in σ-dependent arguments (one F1 and two 2F1 terms).
NumValue i3_sigma_form(const VertexKinematics& k, const PrecisionContext& ctx);

/// |I3(d+2) - c(d) I3(d) - R(d)| / |I3(d+2)| with both I3 values from
/// F1_FORMULA.
NumValue i3_recurrence_residual(const VertexKinematics& k, const PrecisionContext& ctx);

struct OdeResidualOptions {
  /// Multiplies every I_11 input on the right-hand side (fault injection).
  Real bubble_scale = Real(1);
  /// Stencil half-width; default 10^(-working/5).
  std::optional<Real> step;
};

/// The two sides of a differential or difference equation, evaluated apart.
struct ResidualSides {
  NumValue lhs, rhs;
};

/// dI3/ds12 (5-point central difference of F1_FORMULA values) and the
/// right-hand side of the first-order ODE in s12.
ResidualSides i3_ode_sides(const VertexKinematics& k, const PrecisionContext& ctx,
                           const OdeResidualOptions& opts = {});

/// Absolute residual of the first-order ODE in s12 satisfied by I3, with the
/// derivative from a 5-point central difference of F1_FORMULA values.
NumValue i3_ode_residual(const VertexKinematics& k, const PrecisionContext& ctx,
                         const OdeResidualOptions& opts = {});

// --- sunrise -------------------------------------------------------------------

struct SunriseKinematics {
  Real x;  // q/m
  Real msq;
  Real d;
};

enum class SunriseMethod { Series2F1, Quadrature };

std::string_view to_string(SunriseMethod m);
std::optional<SunriseMethod> parse_sunrise_method(std::string_view name);

/// Throws unless x > 3, m^2 > 0, d in (2,6) and d/2, d-1 pole-free.
void validate(const SunriseKinematics& k, const PrecisionContext& ctx);

/// Z(x) = x^2 (x^2-9)^2 / (x^2+3)^3.
Real sunrise_z(const Real& x);

NumValue im_j3(const SunriseKinematics& k, SunriseMethod method, const PrecisionContext& ctx);

/// Relative residual of the third-order difference equation in d linking
/// Im J3 at d, d+2 and d+4 (SERIES_2F1 values).
NumValue im_j3_diffeq_residual(const SunriseKinematics& k, const PrecisionContext& ctx);

/// The d+4 term of that equation against the sum of the d+2 and d terms.
ResidualSides im_j3_diffeq_sides(const SunriseKinematics& k, const PrecisionContext& ctx);

}  // namespace feynhyper
