#pragma once

// Numeric substrate: precision policy, error-carrying scalars, the gamma
// family, the series summation driver and tanh-sinh quadrature.

#include <cstdint>
#include <functional>

#include "feynhyper/errors.hpp"
#include "feynhyper/real.hpp"

namespace feynhyper {

/// Precision and truncation policy threaded through every evaluation.
class PrecisionContext {
 public:
  /// Default policy for `target_digits`: working = target + max(20, target/10).
  static PrecisionContext for_digits(int target_digits);

  /// Explicit construction; throws std::invalid_argument when
  /// working < target + 20, max_terms < 1000 or max_quad_level < 8.
  PrecisionContext(int target_digits, int working_digits, long max_terms, int max_quad_level);

  int target_digits() const { return target_digits_; }
  int working_digits() const { return working_digits_; }
  long max_terms() const { return max_terms_; }
  int max_quad_level() const { return max_quad_level_; }

  /// Copy with a different target (working digits re-derived).
  PrecisionContext with_target(int target_digits) const;

  /// 10^(-working+5): pole proximity tolerance shared by every module.
  Real pole_tolerance() const;

 private:
  int target_digits_;
  int working_digits_;
  long max_terms_;
  int max_quad_level_;
};

/// Arbitrary-precision value with a conservative absolute error bound.
struct NumValue {
  Real value;
  Real abs_err;

  NumValue();
  NumValue(Real v);  // NOLINT(google-explicit-constructor): exact value
  NumValue(Real v, Real err);

  /// Relative error bound |err / value| (inf for a zero value with error).
  Real rel_err() const;
};

NumValue operator-(const NumValue& a);
NumValue operator+(const NumValue& a, const NumValue& b);
NumValue operator-(const NumValue& a, const NumValue& b);
NumValue operator*(const NumValue& a, const NumValue& b);
NumValue operator/(const NumValue& a, const NumValue& b);
/// a^p for a > 0 and an exact exponent.
NumValue pow(const NumValue& a, const Real& p);

struct SeriesResult {
  NumValue value;
  long terms_used = 0;
  bool converged = false;
};

/// Γ(z). Throws PoleError when z is within ctx.pole_tolerance() of a
/// non-positive integer.
NumValue gamma(const Real& z, const PrecisionContext& ctx);

/// 1/Γ(z); exactly zero at the poles of Γ.
Real rgamma(const Real& z, const PrecisionContext& ctx);

/// True when z is within ctx.pole_tolerance() of 0, -1, -2, ...
bool near_nonpositive_integer(const Real& z, const PrecisionContext& ctx);

/// True when z is within ctx.pole_tolerance() of an integer.
bool near_integer(const Real& z, const PrecisionContext& ctx);

/// Rising factorial (a)_k by the product form.
NumValue pochhammer(const Real& a, long k, const PrecisionContext& ctx);

/// Källén function (x-y-z)^2 - 4yz.
Real kallen(const Real& x, const Real& y, const Real& z);

/// Produces term n of a series. Called with n = 0, 1, 2, ... in order, so a
/// generator may keep recurrence state between calls.
using TermGenerator = std::function<Real(long n)>;

/// Sums a series until 8 consecutive terms each satisfy
/// |t| <= 10^(-working) |partial sum|. Returns converged=false (and
/// terms_used = max_terms) when the cap is reached; see sum_series_checked.
SeriesResult sum_series(const TermGenerator& term, const PrecisionContext& ctx);

/// sum_series that throws NonConvergence instead of returning converged=false.
NumValue sum_series_checked(const TermGenerator& term, const PrecisionContext& ctx,
                            const char* what);

/// Double series Σ_{k,l} T(k,l) summed over diagonal shells k+l = n.
/// `step_l(k, l, t)` maps T(k,l) to T(k,l+1); `step_k(k, t)` maps T(k,0) to
/// T(k+1,0). Both receive the current term so zero terms never divide.
struct DoubleSeriesSteps {
  Real first;  // T(0,0)
  std::function<Real(long k, long l, const Real& t)> step_l;
  std::function<Real(long k, const Real& t)> step_k;
};

SeriesResult sum_double_series(const DoubleSeriesSteps& steps, const PrecisionContext& ctx);

/// Quadrature node handed to endpoint-aware integrands: the abscissa plus its
/// distances to both interval ends, each accurate to full relative precision.
struct QuadNode {
  Real x;
  Real from_lower;
  Real from_upper;
};

using Integrand = std::function<Real(const Real& x)>;
using EndpointIntegrand = std::function<Real(const QuadNode& node)>;

/// Tanh-sinh quadrature of `f` over (lower, upper).
NumValue quad_de(const Integrand& f, const Real& lower, const Real& upper,
                 const PrecisionContext& ctx);

/// Same as quad_de, for integrands with algebraic endpoint singularities that
/// need the accurate endpoint distances.
NumValue quad_de_endpoint(const EndpointIntegrand& f, const Real& lower, const Real& upper,
                          const PrecisionContext& ctx);

}  // namespace feynhyper
