#pragma once

// Registry of the hypergeometric and Feynman-integral relations, each with
// two independently evaluated sides, a validity domain and a sampler; plus
// verification, sweeping and numeric pinning of a single unknown argument.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "feynhyper/feynman.hpp"

namespace feynhyper {

/// Named parameters as decimal literals, so points round-trip exactly through
/// the command line and JSON.
using Point = std::map<std::string, std::string>;

/// Reads a parameter at the current precision. std::invalid_argument when it
/// is missing or not a decimal literal.
Real point_real(const Point& p, const std::string& name);

using SideEvaluator = std::function<NumValue(const Point&, const PrecisionContext&)>;

struct NamedValue {
  std::string label;
  NumValue value;
};

/// A single unknown scalar argument on the RHS that can be solved for.
struct PinSpec {
  std::string unknown;  // what the unknown stands for
  /// Bracket of the search interval, as functions of the point.
  std::function<std::pair<Real, Real>(const Point&)> bracket;
  /// Builds RHS(u) for a fixed point; parts that do not depend on u are
  /// computed once.
  std::function<std::function<NumValue(const Real&)>(const Point&, const PrecisionContext&)> rhs_of;
  /// Registered closed form of the unknown.
  std::function<Real(const Point&)> candidate;
  /// (numerator, denominator) degrees when the unknown is a rational
  /// function of the parameter "x" alone.
  std::optional<std::pair<int, int>> rational_in_x;
};

struct IdentityRecord {
  std::string id;
  std::string description;
  std::string citation;
  /// Parameter names with the record's default point.
  Point defaults;
  SideEvaluator lhs;
  SideEvaluator rhs;
  /// Further RHS evaluations compared against the LHS (cross-method records);
  /// verify reports the worst agreeing one.
  std::function<std::vector<NamedValue>(const Point&, const PrecisionContext&)> rhs_alternatives;
  std::function<bool(const Point&, const PrecisionContext&)> domain;
  /// One uniform draw from the sampling box (not yet domain-filtered).
  std::function<Point(std::mt19937_64&)> draw;
  /// Human-readable description of the sampling box.
  std::string sampler_box;
  std::optional<PinSpec> pin;
};

/// The immutable registry, in a fixed order.
const std::vector<IdentityRecord>& registry();

/// UnknownIdentity when `id` is not registered.
const IdentityRecord& find_identity(const std::string& id);

/// `n` admissible points drawn deterministically from the record's box.
std::vector<Point> sample_points(const IdentityRecord& rec, int n, std::uint64_t seed,
                                 const PrecisionContext& ctx);

enum class Status { Pass, Fail, Skip };

std::string_view to_string(Status s);

struct VerificationReport {
  std::string id;
  Point point;
  NumValue lhs_value;
  NumValue rhs_value;
  int matched_digits = 0;
  Status status = Status::Skip;
  std::uint64_t seed = 0;
  int ctx_digits = 0;
  /// Empty on PASS; otherwise why the point was skipped or failed, or which
  /// alternative RHS disagreed most.
  std::string reason;
};

/// floor(-log10(|a-b| / max(|a|, |b|, 10^-working))) clamped to [0, working].
int matched_digits(const Real& a, const Real& b, const PrecisionContext& ctx);

/// Evaluates both sides at `point`. Points outside the domain give a SKIP
/// report without evaluating either side; DomainError/PoleError thrown by an
/// evaluator also give SKIP. std::invalid_argument for a missing parameter.
VerificationReport verify(const std::string& id, const Point& point, const PrecisionContext& ctx,
                          std::uint64_t seed = 0);

/// verify on `n` sampled points, in sampler order. std::invalid_argument for n < 1.
std::vector<VerificationReport> sweep(const std::string& id, int n, std::uint64_t seed,
                                      const PrecisionContext& ctx);

struct PinResult {
  Point point;
  Real pinned;
  std::optional<Real> candidate;
};

/// Solves RHS(u) = LHS for the record's unknown at each point by bisection
/// followed by safeguarded secant steps, to 10^(-target) relative. Throws
/// std::invalid_argument when the record has no unknown, NoBracket when the
/// bracket ends do not straddle the root.
std::vector<PinResult> pin_argument(const std::string& id, const std::vector<Point>& points,
                                    const PrecisionContext& ctx);

struct RationalFit {
  int num_degree = 0;
  int den_degree = 0;
  int points = 0;
  /// Largest |P(t_i)/Q(t_i) - v_i| / max|v| over all points.
  Real max_residual;
  bool consistent = false;
};

/// Least-squares fit of v = P(t)/Q(t) (Q(0) = 1) by Householder QR at twice
/// the working precision. Consistent when the residual is within
/// 10^(-target+10); needs more points than unknowns.
RationalFit rational_consistency(const std::vector<Real>& t, const std::vector<Real>& v,
                                 int num_degree, int den_degree, const PrecisionContext& ctx);

}  // namespace feynhyper
