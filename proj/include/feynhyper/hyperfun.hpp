#pragma once

// Hypergeometric evaluators: Gauss 2F1, 3F2, Appell F1 / F4 and the
// Kampé de Fériet function F^{2;1;0}_{1;0;0}, each with explicit
// convergence-domain dispatch.

#include <cstdint>
#include <string_view>

#include "feynhyper/numkernel.hpp"

namespace feynhyper {

struct Gauss2F1Params {
  Real a, b, c;
};

struct Hyp3F2Params {
  Real a1, a2, a3;
  Real b1, b2;
};

struct AppellF1Params {
  Real a, b, bp, c;
};

struct AppellF4Params {
  Real a, b, c1, c2;
};

/// Parameters of F^{2;1;0}_{1;0;0}[(alpha:1,1),(nu1:1,1):(nu2:1);(nu1+nu2:2,1)].
struct KdFParams {
  Real alpha, nu1, nu2;
};

/// Radius of the polydisc inside which double/triple-parameter series are
/// summed directly.
Real series_radius();  // 0.95

// --- Gauss 2F1 ---------------------------------------------------------------

/// The argument map used to evaluate 2F1.
enum class Gauss2F1Map { Identity, Pfaff, OneMinus, Inverse, InverseOneMinus, OneMinusInverse };

std::string_view to_string(Gauss2F1Map m);

/// 2F1(a,b;c;z) for z < 1. Direct series for |z| <= 1/2, otherwise the
/// smallest-modulus pole-free image among the six standard maps.
NumValue hyp2f1(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx);

/// The map hyp2f1 would choose at (p, z); throws like hyp2f1.
Gauss2F1Map hyp2f1_route(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx);

/// Plain Maclaurin series for |z| < 1 (no transformations).
NumValue hyp2f1_series(const Gauss2F1Params& p, const Real& z, const PrecisionContext& ctx);

// --- 3F2 ---------------------------------------------------------------------

/// 3F2 by direct series. Admits |z| <= 0.95, or 0.95 < z < 1 when
/// b1+b2-a1-a2-a3 > 0.
NumValue hyp3f2(const Hyp3F2Params& p, const Real& z, const PrecisionContext& ctx);

// --- Appell F1 ---------------------------------------------------------------

enum class F1Route { Series, Euler, PfaffSeries, PfaffEuler };

std::string_view to_string(F1Route r);

struct F1Evaluation {
  NumValue value;
  F1Route route;
};

/// Dispatcher: double series, then Euler integral, then the Pfaff map.
F1Evaluation appell_f1_routed(const AppellF1Params& p, const Real& w, const Real& z,
                              const PrecisionContext& ctx);

NumValue appell_f1(const AppellF1Params& p, const Real& w, const Real& z,
                   const PrecisionContext& ctx);

/// Whether any route admits the point (pole checks on c included).
bool appell_f1_admissible(const AppellF1Params& p, const Real& w, const Real& z,
                          const PrecisionContext& ctx);

/// Single routes, for cross-checking. Each throws DomainError outside its
/// own region.
NumValue appell_f1_series(const AppellF1Params& p, const Real& w, const Real& z,
                          const PrecisionContext& ctx);
NumValue appell_f1_euler(const AppellF1Params& p, const Real& w, const Real& z,
                         const PrecisionContext& ctx);
/// (1-w)^-b (1-z)^-b' F1(c-a,b,b';c;w/(w-1),z/(z-1)), the image evaluated by
/// series or Euler integral.
NumValue appell_f1_pfaff(const AppellF1Params& p, const Real& w, const Real& z,
                         const PrecisionContext& ctx);

/// F1(1,1,2-d/2;d/2;x,y) = ((d-2)/2) ∫_0^1 ((1-u)(1-yu))^(d/2-2)/(1-xu) du.
NumValue appell_f1_onefold(const Real& d, const Real& x, const Real& y,
                           const PrecisionContext& ctx);

// --- Appell F4 and Kampé de Fériet -------------------------------------------

/// Double series, admitted for sqrt|x| + sqrt|y| <= 0.95.
NumValue appell_f4(const AppellF4Params& p, const Real& x, const Real& y,
                   const PrecisionContext& ctx);

/// Asymptotic per-shell growth factor of the KdF double series at (x, y):
/// exp(max over directions of the Stirling exponent). Below 1 means convergent.
double kdf_growth_rate(double x, double y);

/// Double series Σ (α)_{k+l}(ν1)_{k+l}(ν2)_k/(ν1+ν2)_{2k+l} x^k y^l/(k! l!),
/// admitted where kdf_growth_rate(x, y) <= 0.95.
NumValue kdf_f210(const KdFParams& p, const Real& x, const Real& y, const PrecisionContext& ctx);

// --- call tracing --------------------------------------------------------------

/// Per-thread count of top-level evaluator entries, used to assert that the two
/// sides of an identity do not share an evaluator path.
struct EvaluatorTrace {
  std::uint64_t hyp2f1 = 0;
  std::uint64_t hyp3f2 = 0;
  std::uint64_t appell_f1 = 0;
  std::uint64_t appell_f1_onefold = 0;
  std::uint64_t appell_f4 = 0;
  std::uint64_t kdf = 0;
};

/// RAII: resets the trace on construction, exposes counts so far.
class TraceScope {
 public:
  TraceScope();
  ~TraceScope();
  TraceScope(const TraceScope&) = delete;
  TraceScope& operator=(const TraceScope&) = delete;
  const EvaluatorTrace& counts() const;

 private:
  EvaluatorTrace saved_;
};

}  // namespace feynhyper
