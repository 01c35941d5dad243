#include <doctest.h>

#include <set>

#include "feynhyper/identities.hpp"

using namespace feynhyper;

namespace {

Real lit(const char* s) { return Real(std::string_view(s)); }

bool same_report(const VerificationReport& a, const VerificationReport& b) {
  return a.id == b.id && a.point == b.point && a.lhs_value.value == b.lhs_value.value &&
         a.rhs_value.value == b.rhs_value.value && a.lhs_value.abs_err == b.lhs_value.abs_err &&
         a.matched_digits == b.matched_digits && a.status == b.status && a.seed == b.seed &&
         a.ctx_digits == b.ctx_digits && a.reason == b.reason;
}

}  // namespace

TEST_CASE("registry contents") {
  const auto& reg = registry();
  CHECK(reg.size() >= 16);
  const std::set<std::string> expected{
      "ID-SWAP",       "ID-F1F4",         "ID-BAILEY",     "ID-F4TOF1",     "ID-KDF",
      "ID-F1-3F2",     "ID-F1-ANTI",      "ID-QUAD",       "ID-F1-2F1",     "ID-CLASSIC",
      "ID-RAMANUJAN",  "ID-I2-XMETHOD",   "ID-I3-XMETHOD", "ID-IMJ3-XMETHOD", "ID-I3-ODE",
      "ID-J3-DIFFEQ"};
  std::set<std::string> ids;
  for (const auto& r : reg) {
    ids.insert(r.id);
    CHECK_FALSE(r.description.empty());
    CHECK_FALSE(r.citation.empty());
    CHECK_FALSE(r.sampler_box.empty());
    CHECK(r.lhs);
    CHECK(r.rhs);
    CHECK(r.draw);
  }
  CHECK(ids == expected);
  CHECK_THROWS_AS(find_identity("ID-NOPE"), UnknownIdentity);
}

TEST_CASE("sampler output satisfies the domain predicate") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  for (const auto& r : registry()) {
    CAPTURE(r.id);
    auto pts = sample_points(r, 3, 1, ctx);
    REQUIRE(pts.size() == 3);
    for (const auto& p : pts) {
      CHECK(r.domain(p, ctx));
      CHECK(p.size() == r.defaults.size());
    }
    CHECK(r.domain(r.defaults, ctx));
  }
  CHECK_THROWS_AS(sample_points(find_identity("ID-BAILEY"), 0, 1, ctx), std::invalid_argument);
}

TEST_CASE("F1-3F2 reduction at the reference point, 80 digits") {
  const auto& r = find_identity("ID-F1-3F2");
  CHECK(r.citation.find("3F2") != std::string::npos);
  Point p{{"alpha", "0.5"}, {"beta", "2"}, {"gamma", "1.5"}, {"x", "-0.5"}};
  auto ctx = PrecisionContext::for_digits(80);
  CHECK(r.domain(p, ctx));
  auto rep = verify("ID-F1-3F2", p, ctx);
  CHECK(rep.status == Status::Pass);
  CHECK(rep.matched_digits >= 75);
  // Frozen oracle from an independent double-series sum.
  PrecisionScope scope(ctx.working_digits());
  const Real frozen = lit("0.957577610130590406210310337565411549107071650406050596816184");
  CHECK(abs(rep.lhs_value.value - frozen) <= pow10(-58));
}

TEST_CASE("classical reduction at a fixed point, 50 digits") {
  auto ctx = PrecisionContext::for_digits(50);
  auto rep = verify("ID-CLASSIC", {{"a", "0.5"}, {"b", "0.5"}, {"bp", "0.5"}, {"w", "0.2"}, {"z", "0.1"}},
                    ctx);
  CHECK(rep.status == Status::Pass);
  CHECK(rep.matched_digits >= 45);
}

TEST_CASE("verify outside the domain skips without evaluating") {
  auto ctx = PrecisionContext::for_digits(30);
  Point p = find_identity("ID-F1-3F2").defaults;
  p["x"] = "0.9";
  TraceScope trace;
  auto rep = verify("ID-F1-3F2", p, ctx);
  CHECK(rep.status == Status::Skip);
  CHECK(rep.matched_digits == 0);
  CHECK_FALSE(rep.reason.empty());
  CHECK(trace.counts().appell_f1 == 0);
  CHECK(trace.counts().hyp3f2 == 0);
  CHECK(rep.lhs_value.value.is_zero());
}

TEST_CASE("verify rejects malformed points") {
  auto ctx = PrecisionContext::for_digits(30);
  Point p = find_identity("ID-CLASSIC").defaults;
  p.erase("w");
  CHECK_THROWS_AS(verify("ID-CLASSIC", p, ctx), std::invalid_argument);
  p["w"] = "0.2x";
  CHECK_THROWS_AS(verify("ID-CLASSIC", p, ctx), std::invalid_argument);
  p["w"] = "0.2";
  p["extra"] = "1";
  CHECK_THROWS_AS(verify("ID-CLASSIC", p, ctx), std::invalid_argument);
  CHECK_THROWS_AS(verify("ID-NOPE", p, ctx), UnknownIdentity);
}

TEST_CASE("matched_digits formula") {
  auto ctx = PrecisionContext::for_digits(30);  // working 50
  PrecisionScope scope(ctx.working_digits());
  CHECK(matched_digits(Real(2), Real(2), ctx) == 50);
  CHECK(matched_digits(Real(0), Real(0), ctx) == 50);
  CHECK(matched_digits(Real(1), Real(1) + 2 * pow10(-10), ctx) == 9);
  CHECK(matched_digits(Real(1), Real(1) + 3 * pow10(-11), ctx) == 10);
  CHECK(matched_digits(Real(1), Real(-1), ctx) == 0);
  // Near-zero values are measured against the 10^-working floor.
  CHECK(matched_digits(pow10(-60), lit("1.5e-60"), ctx) == 10);
  CHECK(matched_digits(pow10(-40), 2 * pow10(-40), ctx) == 0);
  CHECK(matched_digits(pow10(-55), 3 * pow10(-55), ctx) == 4);
}

TEST_CASE("sweeps of the reduction identities") {
  auto ctx = PrecisionContext::for_digits(40);
  auto bailey = sweep("ID-BAILEY", 20, 1, ctx);
  REQUIRE(bailey.size() == 20);
  for (const auto& r : bailey) CHECK(r.status == Status::Pass);
  auto swap = sweep("ID-SWAP", 10, 7, ctx);
  REQUIRE(swap.size() == 10);
  for (const auto& r : swap) {
    CHECK(r.status == Status::Pass);
    CHECK(r.seed == 7);
    CHECK(r.ctx_digits == 40);
  }
  CHECK_THROWS_AS(sweep("ID-BAILEY", 0, 1, ctx), std::invalid_argument);
  CHECK_THROWS_AS(sweep("ID-NOPE", 3, 1, ctx), UnknownIdentity);
}

TEST_CASE("sweep determinism") {
  auto ctx = PrecisionContext::for_digits(30);
  for (const char* id : {"ID-KDF", "ID-CLASSIC", "ID-I2-XMETHOD"}) {
    CAPTURE(id);
    auto a = sweep(id, 4, 11, ctx);
    auto b = sweep(id, 4, 11, ctx);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_report(a[i], b[i]));
    auto c = sweep(id, 4, 12, ctx);
    CHECK(c[0].point != a[0].point);
  }
}

TEST_CASE("pinning recovers the registered arguments") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  auto classic = pin_argument("ID-CLASSIC", {find_identity("ID-CLASSIC").defaults}, ctx);
  REQUIRE(classic.size() == 1);
  CHECK(abs(classic[0].pinned - Real(1) / 9) <= pow10(-30));

  auto f13 = pin_argument("ID-F1-3F2", {find_identity("ID-F1-3F2").defaults}, ctx);
  CHECK(abs(f13[0].pinned + Real(1) / 24) <= pow10(-30));
  REQUIRE(f13[0].candidate);
  CHECK(abs(*f13[0].candidate + Real(1) / 24) <= pow10(-45));

  auto pts = sample_points(find_identity("ID-QUAD"), 4, 3, ctx);
  for (const auto& r : pin_argument("ID-QUAD", pts, ctx)) {
    REQUIRE(r.candidate);
    CHECK(abs(r.pinned - *r.candidate) <= pow10(-25) * max(Real(1), abs(*r.candidate)));
  }

  CHECK_THROWS_AS(pin_argument("ID-BAILEY", {find_identity("ID-BAILEY").defaults}, ctx),
                  std::invalid_argument);
  // (w-z)/(1-z) = -94 lies outside the search bracket.
  Point far{{"a", "0.5"}, {"b", "0.5"}, {"bp", "0.5"}, {"w", "-0.9"}, {"z", "0.98"}};
  CHECK_THROWS_AS(pin_argument("ID-CLASSIC", {far}, ctx), NoBracket);
}

TEST_CASE("pinned Z(x) is a degree-(6,6) rational function") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  std::vector<Point> pts;
  for (int i = 0; i < 16; ++i) {
    Real x = Real("3.2") + Real(i) * (Real("5.7") / 15);
    pts.push_back({{"x", x.to_string(12)}, {"d", "4"}});
  }
  auto pins = pin_argument("ID-F1-2F1", pts, ctx);
  std::vector<Real> t, v;
  for (const auto& r : pins) {
    t.push_back((point_real(r.point, "x") - 6) / 3);
    v.push_back(r.pinned);
    CHECK(abs(r.pinned - *r.candidate) <= pow10(-25));
  }
  RationalFit fit = rational_consistency(t, v, 6, 6, ctx);
  CHECK(fit.consistent);
  CHECK(fit.points == 16);
  RationalFit low = rational_consistency(t, v, 2, 2, ctx);
  CHECK_FALSE(low.consistent);
  CHECK_THROWS_AS(rational_consistency(std::vector<Real>(t.begin(), t.begin() + 8),
                                       std::vector<Real>(v.begin(), v.begin() + 8), 6, 6, ctx),
                  std::invalid_argument);
}

TEST_CASE("two sides use independent evaluator paths") {
  auto ctx = PrecisionContext::for_digits(30);
  PrecisionScope scope(ctx.working_digits());
  // (counter on the LHS, counter that must stay zero on the LHS, and vice versa)
  struct Rule {
    const char* id;
    std::uint64_t EvaluatorTrace::*lhs_uses;
    std::uint64_t EvaluatorTrace::*rhs_uses;
  };
  const Rule rules[] = {
      {"ID-F1F4", &EvaluatorTrace::appell_f1, &EvaluatorTrace::appell_f4},
      {"ID-BAILEY", &EvaluatorTrace::appell_f4, &EvaluatorTrace::appell_f1},
      {"ID-F4TOF1", &EvaluatorTrace::appell_f4, &EvaluatorTrace::appell_f1},
      {"ID-KDF", &EvaluatorTrace::kdf, &EvaluatorTrace::appell_f1},
      {"ID-F1-3F2", &EvaluatorTrace::appell_f1, &EvaluatorTrace::hyp3f2},
      {"ID-F1-ANTI", &EvaluatorTrace::appell_f1, &EvaluatorTrace::hyp3f2},
      {"ID-QUAD", &EvaluatorTrace::appell_f1_onefold, &EvaluatorTrace::appell_f1},
      {"ID-F1-2F1", &EvaluatorTrace::appell_f1, &EvaluatorTrace::hyp2f1},
      {"ID-CLASSIC", &EvaluatorTrace::appell_f1, &EvaluatorTrace::hyp2f1},
  };
  for (const Rule& rule : rules) {
    CAPTURE(rule.id);
    const auto& rec = find_identity(rule.id);
    EvaluatorTrace l, r;
    {
      TraceScope t;
      rec.lhs(rec.defaults, ctx);
      l = t.counts();
    }
    {
      TraceScope t;
      rec.rhs(rec.defaults, ctx);
      r = t.counts();
    }
    CHECK(l.*rule.lhs_uses > 0);
    CHECK(r.*rule.rhs_uses > 0);
    CHECK(l.*rule.rhs_uses == 0);
    CHECK(r.*rule.lhs_uses == 0);
  }
  // The AGM side of the cubic relation touches no hypergeometric evaluator.
  const auto& ram = find_identity("ID-RAMANUJAN");
  TraceScope t;
  ram.lhs(ram.defaults, ctx);
  CHECK(t.counts().hyp2f1 == 0);
}

TEST_CASE("matched digits grow with the target") {
  const char* ids[] = {"ID-BAILEY", "ID-KDF", "ID-F1-ANTI", "ID-CLASSIC", "ID-F1-2F1"};
  auto c30 = PrecisionContext::for_digits(30);
  auto c40 = PrecisionContext::for_digits(40);
  for (const char* id : ids) {
    CAPTURE(id);
    auto pts = sample_points(find_identity(id), 3, 5, c30);
    for (const auto& p : pts) {
      auto a = verify(id, p, c30);
      auto b = verify(id, p, c40);
      REQUIRE(a.status == Status::Pass);
      CHECK(b.matched_digits >= a.matched_digits - 2);
    }
  }
}

TEST_CASE("differential and difference equation records") {
  auto ctx = PrecisionContext::for_digits(30);
  for (const char* id : {"ID-I3-ODE", "ID-J3-DIFFEQ", "ID-IMJ3-XMETHOD", "ID-I3-XMETHOD"}) {
    CAPTURE(id);
    auto rep = verify(id, find_identity(id).defaults, ctx);
    CHECK(rep.status == Status::Pass);
  }
}
