#include "feynhyper/numkernel.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace feynhyper {

// --- PrecisionContext --------------------------------------------------------

PrecisionContext PrecisionContext::for_digits(int target_digits) {
  if (target_digits < 1) throw std::invalid_argument("target_digits must be positive");
  const int working = target_digits + std::max(20, target_digits / 10);
  const long max_terms = std::max(20000L, 100L * working);
  return PrecisionContext(target_digits, working, max_terms, 12);
}

PrecisionContext::PrecisionContext(int target_digits, int working_digits, long max_terms,
                                   int max_quad_level)
    : target_digits_(target_digits),
      working_digits_(working_digits),
      max_terms_(max_terms),
      max_quad_level_(max_quad_level) {
  if (target_digits < 1) throw std::invalid_argument("target_digits must be positive");
  if (working_digits < target_digits + 20)
    throw std::invalid_argument("working_digits must be >= target_digits + 20");
  if (max_terms < 1000) throw std::invalid_argument("max_terms must be >= 1000");
  if (max_quad_level < 8) throw std::invalid_argument("max_quad_level must be >= 8");
}

PrecisionContext PrecisionContext::with_target(int target_digits) const {
  PrecisionContext c = for_digits(target_digits);
  return PrecisionContext(c.target_digits_, c.working_digits_,
                          std::max(c.max_terms_, max_terms_),
                          std::max(c.max_quad_level_, max_quad_level_));
}

Real PrecisionContext::pole_tolerance() const { return pow10(-working_digits_ + 5); }

// --- NumValue ----------------------------------------------------------------

NumValue::NumValue() : value(0), abs_err(0) {}
NumValue::NumValue(Real v) : value(std::move(v)), abs_err(0) {}
NumValue::NumValue(Real v, Real err) : value(std::move(v)), abs_err(abs(err)) {}

Real NumValue::rel_err() const {
  if (value.is_zero()) return abs_err.is_zero() ? Real(0) : Real(1) / Real(0);
  return abs_err / abs(value);
}

namespace {

Real rounding(const Real& v) { return epsilon() * abs(v); }

}  // namespace

NumValue operator-(const NumValue& a) { return {-a.value, a.abs_err}; }

NumValue operator+(const NumValue& a, const NumValue& b) {
  Real v = a.value + b.value;
  return {v, a.abs_err + b.abs_err + rounding(v)};
}

NumValue operator-(const NumValue& a, const NumValue& b) {
  Real v = a.value - b.value;
  return {v, a.abs_err + b.abs_err + rounding(v)};
}

NumValue operator*(const NumValue& a, const NumValue& b) {
  Real v = a.value * b.value;
  return {v, abs(a.value) * b.abs_err + abs(b.value) * a.abs_err + a.abs_err * b.abs_err +
                 rounding(v)};
}

NumValue operator/(const NumValue& a, const NumValue& b) {
  Real v = a.value / b.value;
  Real denom = abs(b.value) - b.abs_err;
  if (denom.sign() <= 0) return {v, Real(1) / Real(0)};
  return {v, (a.abs_err + abs(v) * b.abs_err) / denom + rounding(v)};
}

NumValue pow(const NumValue& a, const Real& p) {
  Real v = pow(a.value, p);
  Real err = rounding(v);
  if (!a.abs_err.is_zero()) err += 2 * abs(p) * abs(v) * a.abs_err / abs(a.value);
  return {v, err};
}

// --- gamma family ------------------------------------------------------------

bool near_integer(const Real& z, const PrecisionContext& ctx) {
  return abs(z - round(z)) <= ctx.pole_tolerance();
}

bool near_nonpositive_integer(const Real& z, const PrecisionContext& ctx) {
  return z <= ctx.pole_tolerance() && near_integer(z, ctx);
}

NumValue gamma(const Real& z, const PrecisionContext& ctx) {
  if (near_nonpositive_integer(z, ctx))
    throw PoleError("Gamma pole at z = " + z.to_string(20));
  Real g = tgamma_raw(z);
  if (!g.is_finite()) throw PoleError("Gamma overflow at z = " + z.to_string(20));
  return {g, 4 * epsilon() * abs(g)};
}

Real rgamma(const Real& z, const PrecisionContext& ctx) {
  if (near_nonpositive_integer(z, ctx)) return Real(0);
  return Real(1) / tgamma_raw(z);
}

NumValue pochhammer(const Real& a, long k, const PrecisionContext& /*ctx*/) {
  Real p(1);
  for (long j = 0; j < k; ++j) p *= a + j;
  return {p, 2 * k * epsilon() * abs(p)};
}

Real kallen(const Real& x, const Real& y, const Real& z) {
  Real t = x - y - z;
  return t * t - 4 * y * z;
}

// --- series ------------------------------------------------------------------

namespace {

/// Shared stopping rule: 8 consecutive contributions each below
/// 10^(-working) of the running sum.
class SeriesAccumulator {
 public:
  explicit SeriesAccumulator(const PrecisionContext& ctx)
      : threshold_(pow10(-ctx.working_digits())) {}

  /// Returns true when the stopping rule has fired.
  bool add(const Real& contribution, const Real& abs_contribution) {
    sum_ += contribution;
    abs_sum_ += abs_contribution;
    recent_[count_ % kWindow] = abs(contribution);
    ++count_;
    if (abs(contribution) <= threshold_ * abs(sum_)) {
      ++small_run_;
    } else {
      small_run_ = 0;
    }
    return small_run_ >= kWindow;
  }

  NumValue result() const {
    Real tail(0);
    const long n = std::min<long>(count_, kWindow);
    for (long i = 0; i < n; ++i) tail += recent_[i];
    Real round_err = 4 * count_ * epsilon() * abs_sum_;
    return {sum_, tail + round_err};
  }

  long count() const { return count_; }

 private:
  static constexpr long kWindow = 8;
  Real threshold_;
  Real sum_{0};
  Real abs_sum_{0};
  Real recent_[kWindow];
  long count_ = 0;
  long small_run_ = 0;
};

}  // namespace

SeriesResult sum_series(const TermGenerator& term, const PrecisionContext& ctx) {
  SeriesAccumulator acc(ctx);
  for (long n = 0; n < ctx.max_terms(); ++n) {
    Real t = term(n);
    if (!t.is_finite()) throw DomainError("series term is not finite at index " + std::to_string(n));
    if (acc.add(t, abs(t))) return {acc.result(), acc.count(), true};
  }
  return {acc.result(), ctx.max_terms(), false};
}

NumValue sum_series_checked(const TermGenerator& term, const PrecisionContext& ctx,
                            const char* what) {
  SeriesResult r = sum_series(term, ctx);
  if (!r.converged)
    throw NonConvergence(std::string(what) + ": no convergence after " +
                         std::to_string(r.terms_used) + " terms");
  return r.value;
}

SeriesResult sum_double_series(const DoubleSeriesSteps& steps, const PrecisionContext& ctx) {
  SeriesAccumulator acc(ctx);
  std::vector<Real> shell{steps.first};
  std::vector<Real> next;
  for (long n = 0; n < ctx.max_terms(); ++n) {
    if (n > 0) {
      next.clear();
      next.reserve(shell.size() + 1);
      for (long k = 0; k < n; ++k) next.push_back(steps.step_l(k, n - 1 - k, shell[k]));
      next.push_back(steps.step_k(n - 1, shell[n - 1]));
      shell.swap(next);
    }
    Real s(0);
    Real a(0);
    for (const Real& t : shell) {
      s += t;
      a += abs(t);
    }
    if (!a.is_finite()) throw DomainError("double series shell " + std::to_string(n) + " not finite");
    if (acc.add(s, a)) return {acc.result(), acc.count(), true};
  }
  return {acc.result(), ctx.max_terms(), false};
}

// --- tanh-sinh quadrature ----------------------------------------------------

namespace {

struct Abscissa {
  Real weight;  // dx/dt on the reference interval (-1, 1)
  Real comp;    // 1 - |x| on the reference interval
};

Abscissa abscissa(const Real& t_abs) {
  const Real half_pi = pi() / 2;
  Real s = half_pi * sinh(t_abs);
  Real q = exp(-2 * s);
  Real onepq = 1 + q;
  return {half_pi * cosh(t_abs) * 4 * q / (onepq * onepq), 2 * q / onepq};
}

class TanhSinh {
 public:
  TanhSinh(const EndpointIntegrand& f, const Real& lower, const Real& upper,
           const PrecisionContext& ctx)
      : f_(f), lower_(lower), upper_(upper), half_((upper - lower) / 2), ctx_(ctx) {}

  /// w(t) f(x(t)) for a node at signed offset t.
  Real sample(const Real& t) {
    if (t.is_zero()) {
      QuadNode node{(lower_ + upper_) / 2, half_, half_};
      return eval(node) * (pi() / 2);
    }
    Abscissa a = abscissa(abs(t));
    Real near = half_ * a.comp;
    Real far = half_ * (2 - a.comp);
    QuadNode node = t.sign() > 0 ? QuadNode{upper_ - near, far, near}
                                 : QuadNode{lower_ + near, near, far};
    if (near.is_zero()) return Real(0);
    return a.weight * eval(node);
  }

  NumValue integrate() {
    const int base_level = 2;  // h = 1/4
    const long base_denom = 1L << base_level;
    // Walk outward at h = 1/4 to fix the truncation points on each side.
    Real center = sample(Real(0));
    Real raw_sum = center;
    Real l1 = abs(center);
    std::vector<Real> coarse_parts(base_level + 1, Real(0));  // sums of nodes by coarsest level
    coarse_parts[0] += center;
    const Real negligible = pow10(-ctx_.working_digits() - 5);
    for (int side : {1, -1}) {
      int quiet = 0;
      long j = 1;
      for (; j < 64 * base_denom; ++j) {
        Real t = Real(side * static_cast<long>(j)) / base_denom;
        Real v = sample(t);
        raw_sum += v;
        l1 += abs(v);
        int lvl = (j % 4 == 0) ? 0 : (j % 2 == 0 ? 1 : 2);
        coarse_parts[lvl] += v;
        if (abs(v) <= negligible * l1) {
          if (++quiet >= 4 && j > base_denom) break;
        } else {
          quiet = 0;
        }
      }
      (side > 0 ? jmax_pos_ : jmax_neg_) = j;
    }
    // Level sums: S_l = h_l * Σ over nodes of level <= l.
    Real s0 = coarse_parts[0];
    Real s1 = s0 + coarse_parts[1];
    Real prev = s1 / 2;
    Real cur = raw_sum / 4;
    const Real tol = pow10(-ctx_.target_digits() - 5);
    long denom = base_denom;
    for (int level = base_level + 1;; ++level) {
      Real diff = abs(cur - prev);
      if (level > base_level + 1 && diff <= tol * abs(cur) + negligible * l1 / denom) {
        return {cur, diff + 8 * epsilon() * l1 / denom};
      }
      if (level > ctx_.max_quad_level()) {
        throw QuadFailure("tanh-sinh: no agreement after level " +
                          std::to_string(ctx_.max_quad_level()) + " (last difference " +
                          diff.to_string(5) + ")");
      }
      // Add odd multiples of the new step 1/(2 denom).
      denom *= 2;
      for (int side : {1, -1}) {
        const long jmax = (side > 0 ? jmax_pos_ : jmax_neg_) * (denom / base_denom);
        for (long j = 1; j <= jmax; j += 2) {
          Real v = sample(Real(side * j) / denom);
          raw_sum += v;
          l1 += abs(v);
        }
      }
      prev = cur;
      cur = raw_sum / denom;
    }
  }

 private:
  Real eval(const QuadNode& node) {
    Real v = f_(node);
    if (v.is_nan()) throw DomainError("integrand is not real at x = " + node.x.to_string(20));
    if (!v.is_finite()) throw DomainError("integrand is not finite at x = " + node.x.to_string(20));
    return v * half_;
  }

  const EndpointIntegrand& f_;
  Real lower_;
  Real upper_;
  Real half_;
  const PrecisionContext& ctx_;
  long jmax_pos_ = 0;
  long jmax_neg_ = 0;
};

}  // namespace

NumValue quad_de_endpoint(const EndpointIntegrand& f, const Real& lower, const Real& upper,
                          const PrecisionContext& ctx) {
  if (!(lower < upper)) throw DomainError("quad_de: need lower < upper");
  PrecisionScope scope(ctx.working_digits());
  TanhSinh q(f, lower, upper, ctx);
  return q.integrate();
}

NumValue quad_de(const Integrand& f, const Real& lower, const Real& upper,
                 const PrecisionContext& ctx) {
  EndpointIntegrand g = [&f](const QuadNode& node) { return f(node.x); };
  return quad_de_endpoint(g, lower, upper, ctx);
}

}  // namespace feynhyper
