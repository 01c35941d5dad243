#include "feynhyper/real.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace feynhyper {

namespace {

// 50 digits until somebody opens a PrecisionScope.
thread_local mpfr_prec_t g_bits = 176;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

}  // namespace

mpfr_prec_t digits_to_bits(int digits) {
  if (digits < 1) digits = 1;
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 16;
}

mpfr_prec_t current_precision_bits() { return g_bits; }

PrecisionScope::PrecisionScope(int decimal_digits) : saved_(g_bits) {
  g_bits = digits_to_bits(decimal_digits);
}

PrecisionScope::~PrecisionScope() { g_bits = saved_; }

Real::Real() {
  mpfr_init2(value_, g_bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(int v) : Real(static_cast<long>(v)) {}

Real::Real(long v) {
  mpfr_init2(value_, g_bits);
  mpfr_set_si(value_, v, kRnd);
}

Real::Real(long long v) : Real(static_cast<long>(v)) {}

Real::Real(unsigned long v) {
  mpfr_init2(value_, g_bits);
  mpfr_set_ui(value_, v, kRnd);
}

Real::Real(double v) {
  mpfr_init2(value_, g_bits);
  mpfr_set_d(value_, v, kRnd);
}

Real::Real(std::string_view decimal) {
  mpfr_init2(value_, g_bits);
  std::string s(decimal);
  // mpfr_set_str accepts leading whitespace and some extensions; be strict.
  bool ok = !s.empty();
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
          c == '+' || c == 'e' || c == 'E')) {
      ok = false;
      break;
    }
  }
  if (!ok || mpfr_set_str(value_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(value_);
    throw std::invalid_argument("not a decimal literal: '" + s + "'");
  }
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, kRnd);
}

Real::Real(Real&& other) noexcept {
  // Steal the limbs; leave `other` as a valid small zero.
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }

double Real::to_double() const { return mpfr_get_d(value_, kRnd); }

long Real::to_long() const { return mpfr_get_si(value_, kRnd); }

std::string Real::to_string(int digits) const {
  if (is_nan()) return "nan";
  if (mpfr_inf_p(value_)) return sign() > 0 ? "inf" : "-inf";
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

namespace {

template <typename F>
Real unary(const Real& x, F f) {
  Real r;
  f(r.get(), x.get(), kRnd);
  return r;
}

}  // namespace

Real operator-(const Real& a) { return unary(a, mpfr_neg); }

Real operator+(const Real& a, const Real& b) {
  Real r;
  mpfr_add(r.get(), a.get(), b.get(), kRnd);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r;
  mpfr_sub(r.get(), a.get(), b.get(), kRnd);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r;
  mpfr_mul(r.get(), a.get(), b.get(), kRnd);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r;
  mpfr_div(r.get(), a.get(), b.get(), kRnd);
  return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>=(const Real& a, const Real& b) {
  return mpfr_greaterequal_p(a.get(), b.get()) != 0;
}
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
bool operator!=(const Real& a, const Real& b) { return !(a == b); }

std::ostream& operator<<(std::ostream& os, const Real& r) {
  const auto digits = static_cast<int>(static_cast<double>(r.precision()) * 0.30103) - 3;
  return os << r.to_string(digits > 6 ? digits : 6);
}

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.get(), x.get(), y.get(), kRnd);
  return r;
}

Real agm(const Real& a, const Real& b) {
  Real r;
  mpfr_agm(r.get(), a.get(), b.get(), kRnd);
  return r;
}

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.get(), x.get(), n, kRnd);
  return r;
}

Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real expm1(const Real& x) { return unary(x, mpfr_expm1); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real log10(const Real& x) { return unary(x, mpfr_log10); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real sinh(const Real& x) { return unary(x, mpfr_sinh); }
Real cosh(const Real& x) { return unary(x, mpfr_cosh); }
Real tanh(const Real& x) { return unary(x, mpfr_tanh); }
Real tgamma_raw(const Real& x) { return unary(x, mpfr_gamma); }

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.get(), x.get());
  return r;
}

Real round(const Real& x) {
  Real r;
  mpfr_round(r.get(), x.get());
  return r;
}

Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.get(), x.get(), e, kRnd);
  return r;
}

Real pi() {
  Real r;
  mpfr_const_pi(r.get(), kRnd);
  return r;
}

Real epsilon() {
  Real r(1);
  return ldexp(r, 1 - static_cast<long>(g_bits));
}

Real pow10(long e) {
  Real ten(10);
  return pow(ten, e);
}

}  // namespace feynhyper
