#pragma once

// Arbitrary-precision real scalar backed by MPFR.
//
// Every newly produced value (constructor, arithmetic result, function value)
// is allocated at the calling thread's current working precision, which is
// set with PrecisionScope. Copies keep the precision of their source.

#include <mpfr.h>

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace feynhyper {

/// Decimal digits -> MPFR mantissa bits (with a small guard).
mpfr_prec_t digits_to_bits(int digits);

/// Current thread working precision in bits.
mpfr_prec_t current_precision_bits();

/// RAII guard that sets the thread-local working precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(int decimal_digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real();
  Real(int v);            // NOLINT(google-explicit-constructor)
  Real(long v);           // NOLINT(google-explicit-constructor)
  Real(long long v);      // NOLINT(google-explicit-constructor)
  Real(unsigned long v);  // NOLINT(google-explicit-constructor)
  Real(double v);         // NOLINT(google-explicit-constructor)
  /// Parses a decimal literal ("0.5", "-1e-3", "1/3" is not accepted).
  /// Throws std::invalid_argument on malformed input.
  explicit Real(std::string_view decimal);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  double to_double() const;
  long to_long() const;  // rounds to nearest
  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits) const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_nan() const { return mpfr_nan_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

 private:
  mpfr_t value_;
};

Real operator-(const Real& a);
Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);

bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);
bool operator!=(const Real& a, const Real& b);

std::ostream& operator<<(std::ostream& os, const Real& r);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real log10(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real tanh(const Real& x);
Real floor(const Real& x);
Real round(const Real& x);
/// Raw MPFR gamma; no pole handling (see numkernel::gamma).
Real tgamma_raw(const Real& x);
/// Arithmetic-geometric mean of two non-negative reals.
Real agm(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
/// ldexp: x * 2^e.
Real ldexp(const Real& x, long e);

Real pi();
/// Unit roundoff of the current working precision.
Real epsilon();
/// 10^e at the current working precision.
Real pow10(long e);

}  // namespace feynhyper
