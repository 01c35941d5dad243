#include "feynhyper/cli.hpp"

#include <CLI11.hpp>
#include <mpfr.h>

#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

namespace feynhyper {

using nlohmann::ordered_json;

std::string format_real(const Real& r, int digits) {
  if (r.is_nan()) return "nan";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits < 1 ? 1 : digits, r.get());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Summary tally(const std::vector<VerificationReport>& reports) {
  Summary s;
  for (const auto& r : reports) {
    if (r.status == Status::Pass) ++s.pass;
    if (r.status == Status::Fail) ++s.fail;
    if (r.status == Status::Skip) ++s.skip;
  }
  return s;
}

namespace {

int value_digits(const VerificationReport& rep) { return rep.ctx_digits + 5; }

ordered_json numvalue_json(const NumValue& v, int digits) {
  return ordered_json{{"value", format_real(v.value, digits)}, {"abs_err", format_real(v.abs_err, 3)}};
}

NumValue numvalue_from(const ordered_json& j) {
  return NumValue(Real(std::string_view(j.at("value").get<std::string>())),
                  Real(std::string_view(j.at("abs_err").get<std::string>())));
}

Status parse_status(const std::string& s) {
  if (s == "PASS") return Status::Pass;
  if (s == "FAIL") return Status::Fail;
  if (s == "SKIP") return Status::Skip;
  throw std::invalid_argument("unknown status '" + s + "'");
}

}  // namespace

ordered_json report_to_json(const VerificationReport& rep) {
  ordered_json point = ordered_json::object();
  for (const auto& [k, v] : rep.point) point[k] = v;
  const int digits = value_digits(rep);
  return ordered_json{{"id", rep.id},
                      {"point", point},
                      {"lhs_value", numvalue_json(rep.lhs_value, digits)},
                      {"rhs_value", numvalue_json(rep.rhs_value, digits)},
                      {"matched_digits", rep.matched_digits},
                      {"status", std::string(to_string(rep.status))},
                      {"seed", rep.seed},
                      {"ctx_digits", rep.ctx_digits},
                      {"reason", rep.reason}};
}

VerificationReport report_from_json(const ordered_json& j) {
  VerificationReport rep;
  rep.id = j.at("id").get<std::string>();
  for (const auto& [k, v] : j.at("point").items()) rep.point[k] = v.get<std::string>();
  rep.matched_digits = j.at("matched_digits").get<int>();
  rep.status = parse_status(j.at("status").get<std::string>());
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.ctx_digits = j.at("ctx_digits").get<int>();
  rep.reason = j.value("reason", std::string());
  // Parse at enough precision to print the same digits back.
  PrecisionScope scope(value_digits(rep) + 20);
  rep.lhs_value = numvalue_from(j.at("lhs_value"));
  rep.rhs_value = numvalue_from(j.at("rhs_value"));
  return rep;
}

ordered_json report_file_to_json(const ReportFile& file) {
  ordered_json reports = ordered_json::array();
  for (const auto& r : file.reports) reports.push_back(report_to_json(r));
  return ordered_json{{"tool_version", file.tool_version},
                      {"command_line", file.command_line},
                      {"reports", reports},
                      {"summary",
                       {{"pass", file.summary.pass},
                        {"fail", file.summary.fail},
                        {"skip", file.summary.skip}}}};
}

ReportFile report_file_from_json(const ordered_json& j) {
  const std::set<std::string> fields{"tool_version", "command_line", "reports", "summary"};
  if (!j.is_object()) throw std::invalid_argument("report file must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!fields.count(k)) throw std::invalid_argument("unexpected report file field '" + k + "'");
  try {
    ReportFile f;
    f.tool_version = j.at("tool_version").get<std::string>();
    f.command_line = j.at("command_line").get<std::string>();
    for (const auto& r : j.at("reports")) f.reports.push_back(report_from_json(r));
    const auto& s = j.at("summary");
    f.summary = {s.at("pass").get<int>(), s.at("fail").get<int>(), s.at("skip").get<int>()};
    const Summary t = tally(f.reports);
    if (t.pass != f.summary.pass || t.fail != f.summary.fail || t.skip != f.summary.skip)
      throw std::invalid_argument("summary does not match the reports");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report file: ") + e.what());
  }
}

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Point parse_params(const std::vector<std::string>& items) {
  Point p;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError("expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    try {
      Real check(std::string_view{value});
    } catch (const std::invalid_argument&) {
      throw UsageError("parameter " + key + ": not a decimal literal: '" + value + "'");
    }
    if (!p.emplace(key, value).second) throw UsageError("parameter given twice: " + key);
  }
  return p;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string point_text(const Point& p) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : p) parts.push_back(k + "=" + v);
  return join(parts, " ");
}

// Writes the rendered result to --out or to stdout.
bool emit(const CliConfig& cfg, const std::string& text, std::ostream& out, std::ostream& err) {
  if (!cfg.output_path) {
    out << text;
    return true;
  }
  std::ofstream f(*cfg.output_path, std::ios::binary);
  if (!f) {
    err << "error: cannot open " << *cfg.output_path << " for writing\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

// --- eval ----------------------------------------------------------------------

struct FunctionSpec {
  std::vector<std::string> params;
  std::function<NumValue(const Point&, const std::optional<std::string>&, const PrecisionContext&)>
      eval;
};

Real get(const Point& p, const char* k) { return point_real(p, k); }

std::string auto_method_error(const std::string& method) {
  return "unknown method '" + method + "'";
}

const std::map<std::string, FunctionSpec>& functions() {
  static const std::map<std::string, FunctionSpec> table{
      {"2f1",
       {{"a", "b", "c", "z"},
        [](const Point& p, const std::optional<std::string>&, const PrecisionContext& ctx) {
          return hyp2f1({get(p, "a"), get(p, "b"), get(p, "c")}, get(p, "z"), ctx);
        }}},
      {"3f2",
       {{"a1", "a2", "a3", "b1", "b2", "z"},
        [](const Point& p, const std::optional<std::string>&, const PrecisionContext& ctx) {
          return hyp3f2({get(p, "a1"), get(p, "a2"), get(p, "a3"), get(p, "b1"), get(p, "b2")},
                        get(p, "z"), ctx);
        }}},
      {"f1",
       {{"a", "b", "bp", "c", "w", "z"},
        [](const Point& p, const std::optional<std::string>&, const PrecisionContext& ctx) {
          return appell_f1({get(p, "a"), get(p, "b"), get(p, "bp"), get(p, "c")}, get(p, "w"),
                           get(p, "z"), ctx);
        }}},
      {"f4",
       {{"a", "b", "c1", "c2", "x", "y"},
        [](const Point& p, const std::optional<std::string>&, const PrecisionContext& ctx) {
          return appell_f4({get(p, "a"), get(p, "b"), get(p, "c1"), get(p, "c2")}, get(p, "x"),
                           get(p, "y"), ctx);
        }}},
      {"kdf",
       {{"alpha", "nu1", "nu2", "x", "y"},
        [](const Point& p, const std::optional<std::string>&, const PrecisionContext& ctx) {
          return kdf_f210({get(p, "alpha"), get(p, "nu1"), get(p, "nu2")}, get(p, "x"),
                          get(p, "y"), ctx);
        }}},
      {"i2",
       {{"nu1", "nu2", "d", "m1sq", "m2sq", "s12"},
        [](const Point& p, const std::optional<std::string>& method, const PrecisionContext& ctx) {
          BubbleKinematics k{get(p, "nu1"),  get(p, "nu2"),  get(p, "d"),
                             get(p, "m1sq"), get(p, "m2sq"), get(p, "s12")};
          validate(k, ctx);
          if (method) {
            auto m = parse_bubble_method(*method);
            if (!m) throw UsageError(auto_method_error(*method));
            return i2(k, *m, ctx);
          }
          for (auto m : {BubbleMethod::F1Form, BubbleMethod::F4Form, BubbleMethod::KdFForm,
                         BubbleMethod::EqualMass3F2})
            if (i2_admits(k, m, ctx)) return i2(k, m, ctx);
          return i2(k, BubbleMethod::Quadrature, ctx);
        }}},
      {"i3",
       {{"d", "msq", "s12", "s13"},
        [](const Point& p, const std::optional<std::string>& method, const PrecisionContext& ctx) {
          VertexKinematics k{get(p, "msq"), get(p, "s12"), get(p, "s13"), get(p, "d")};
          validate(k, ctx);
          if (method) {
            auto m = parse_vertex_method(*method);
            if (!m) throw UsageError(auto_method_error(*method));
            return i3(k, *m, ctx);
          }
          if (i3_admits(k, VertexMethod::F1Formula, ctx)) return i3(k, VertexMethod::F1Formula, ctx);
          return i3(k, VertexMethod::Quadrature, ctx);
        }}},
      {"imj3",
       {{"x", "msq", "d"},
        [](const Point& p, const std::optional<std::string>& method, const PrecisionContext& ctx) {
          SunriseKinematics k{get(p, "x"), get(p, "msq"), get(p, "d")};
          SunriseMethod m = SunriseMethod::Series2F1;
          if (method) {
            auto parsed = parse_sunrise_method(*method);
            if (!parsed) throw UsageError(auto_method_error(*method));
            m = *parsed;
          }
          return im_j3(k, m, ctx);
        }}},
  };
  return table;
}

int cmd_eval(const std::string& name, const std::vector<std::string>& items,
             const std::optional<std::string>& method, const CliConfig& cfg, std::ostream& out,
             std::ostream& err) {
  auto it = functions().find(name);
  if (it == functions().end()) {
    err << "error: unknown function '" << name << "' (expected 2f1, 3f2, f1, f4, kdf, i2, i3, imj3)\n";
    return kExitUsage;
  }
  const FunctionSpec& spec = it->second;
  const auto ctx = PrecisionContext::for_digits(cfg.digits);
  PrecisionScope scope(ctx.working_digits());
  Point p = parse_params(items);
  for (const auto& [k, v] : p)
    if (std::find(spec.params.begin(), spec.params.end(), k) == spec.params.end())
      throw UsageError("unknown parameter '" + k + "' for " + name);
  for (const auto& k : spec.params)
    if (!p.count(k)) throw UsageError("missing parameter '" + k + "' for " + name);
  if (method && name != "i2" && name != "i3" && name != "imj3")
    throw UsageError("--method applies to i2, i3 and imj3 only");
  NumValue v = spec.eval(p, method, ctx);
  std::string text;
  if (cfg.format == OutputFormat::Json) {
    ordered_json params = ordered_json::object();
    for (const auto& [k, val] : p) params[k] = val;
    ordered_json j{{"tool_version", kToolVersion},
                   {"function", name},
                   {"params", params},
                   {"digits", cfg.digits},
                   {"value", format_real(v.value, cfg.digits)},
                   {"abs_err", format_real(v.abs_err, 3)}};
    if (method) j["method"] = *method;
    text = j.dump(2) + "\n";
  } else {
    text = format_real(v.value, cfg.digits) + "\nabs_err <= " + format_real(v.abs_err, 3) + "\n";
  }
  return emit(cfg, text, out, err) ? kExitOk : kExitUsage;
}

// --- verify / sweep ------------------------------------------------------------

std::string report_text(const VerificationReport& r) {
  std::ostringstream s;
  s << r.id << " " << to_string(r.status) << " matched_digits=" << r.matched_digits
    << " target=" << r.ctx_digits << "\n";
  s << "  point: " << point_text(r.point) << "\n";
  if (!r.lhs_value.value.is_zero() || !r.rhs_value.value.is_zero()) {
    s << "  lhs = " << format_real(r.lhs_value.value, value_digits(r)) << "\n";
    s << "  rhs = " << format_real(r.rhs_value.value, value_digits(r)) << "\n";
  }
  if (!r.reason.empty()) s << "  note: " << r.reason << "\n";
  return s.str();
}

std::string render_reports(const std::vector<VerificationReport>& reports,
                           const std::string& command_line, const CliConfig& cfg) {
  ReportFile f{kToolVersion, command_line, reports, tally(reports)};
  if (cfg.format == OutputFormat::Json) return report_file_to_json(f).dump(2) + "\n";
  std::string text;
  for (const auto& r : reports) text += report_text(r);
  text += "summary: pass=" + std::to_string(f.summary.pass) + " fail=" +
          std::to_string(f.summary.fail) + " skip=" + std::to_string(f.summary.skip) + "\n";
  return text;
}

int cmd_verify(const std::string& id, const std::vector<std::string>& items, const CliConfig& cfg,
               const std::string& command_line, std::ostream& out, std::ostream& err) {
  const IdentityRecord& rec = find_identity(id);
  Point given = parse_params(items);
  Point p = rec.defaults;
  for (const auto& [k, v] : given) {
    if (!rec.defaults.count(k)) throw UsageError(id + ": unknown parameter '" + k + "'");
    p[k] = v;
  }
  const auto ctx = PrecisionContext::for_digits(cfg.digits);
  VerificationReport rep = verify(id, p, ctx, cfg.seed);
  if (!emit(cfg, render_reports({rep}, command_line, cfg), out, err)) return kExitUsage;
  switch (rep.status) {
    case Status::Pass: return kExitOk;
    case Status::Fail: return kExitFail;
    case Status::Skip: return kExitEvaluation;
  }
  return kExitFail;
}

int cmd_sweep(const std::string& id, int n, const CliConfig& cfg, const std::string& command_line,
              std::ostream& out, std::ostream& err) {
  find_identity(id);
  if (n < 1) throw UsageError("--n must be at least 1");
  const auto ctx = PrecisionContext::for_digits(cfg.digits);
  auto reports = sweep(id, n, cfg.seed, ctx);
  if (!emit(cfg, render_reports(reports, command_line, cfg), out, err)) return kExitUsage;
  const Summary s = tally(reports);
  if (s.fail > 0) return kExitFail;
  if (s.skip > 0) return kExitEvaluation;
  return kExitOk;
}

// --- pin -----------------------------------------------------------------------

int cmd_pin(const std::string& id, int n, const CliConfig& cfg, const std::string& command_line,
            std::ostream& out, std::ostream& err) {
  const IdentityRecord& rec = find_identity(id);
  if (!rec.pin) throw UsageError(id + " has no pinnable unknown");
  if (n < 1) throw UsageError("--n must be at least 1");
  const auto ctx = PrecisionContext::for_digits(cfg.digits);
  PrecisionScope scope(ctx.working_digits());
  const auto& spec = *rec.pin;
  // The rational test needs more points than its 13 unknowns.
  const int total = spec.rational_in_x ? std::max(n, 16) : n;
  auto pins = pin_argument(id, sample_points(rec, total, cfg.seed, ctx), ctx);

  const Real tol = pow10(-cfg.digits + 5);
  Real worst(0);
  ordered_json items = ordered_json::array();
  std::string text;
  for (int i = 0; i < n; ++i) {
    const PinResult& r = pins[static_cast<std::size_t>(i)];
    ordered_json point = ordered_json::object();
    for (const auto& [k, v] : r.point) point[k] = v;
    ordered_json item{{"point", point}, {"pinned", format_real(r.pinned, cfg.digits)}};
    text += point_text(r.point) + "  pinned=" + format_real(r.pinned, cfg.digits);
    if (r.candidate) {
      const Real dev = abs(r.pinned - *r.candidate) / max(Real(1), abs(*r.candidate));
      worst = max(worst, dev);
      item["candidate"] = format_real(*r.candidate, cfg.digits);
      item["deviation"] = format_real(dev, 3);
      text += "  deviation=" + format_real(dev, 3);
    }
    text += "\n";
    items.push_back(item);
  }
  bool ok = worst <= tol;
  ordered_json j{{"tool_version", kToolVersion},
                 {"command_line", command_line},
                 {"id", id},
                 {"unknown", spec.unknown},
                 {"pins", items},
                 {"max_deviation", format_real(worst, 3)}};
  text += spec.unknown + ": max deviation from the registered form " + format_real(worst, 3) +
          (ok ? " (ok)" : " (exceeds " + format_real(tol, 3) + ")") + "\n";
  if (spec.rational_in_x) {
    std::vector<Real> t, v;
    for (const auto& r : pins) {
      t.push_back((point_real(r.point, "x") - 6) / 3);
      v.push_back(r.pinned);
    }
    RationalFit fit = rational_consistency(t, v, spec.rational_in_x->first,
                                           spec.rational_in_x->second, ctx);
    ok = ok && fit.consistent;
    j["rational_fit"] = {{"num_degree", fit.num_degree},
                         {"den_degree", fit.den_degree},
                         {"points", fit.points},
                         {"max_residual", format_real(fit.max_residual, 3)},
                         {"consistent", fit.consistent}};
    text += "rational (" + std::to_string(fit.num_degree) + "," + std::to_string(fit.den_degree) +
            ") fit over " + std::to_string(fit.points) + " pinned points: residual " +
            format_real(fit.max_residual, 3) + (fit.consistent ? " consistent" : " INCONSISTENT") +
            "\n";
  }
  const std::string rendered = cfg.format == OutputFormat::Json ? j.dump(2) + "\n" : text;
  if (!emit(cfg, rendered, out, err)) return kExitUsage;
  return ok ? kExitOk : kExitFail;
}

// --- list ----------------------------------------------------------------------

int cmd_list(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string text;
  if (cfg.format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : registry()) {
      ordered_json defaults = ordered_json::object();
      for (const auto& [k, v] : r.defaults) defaults[k] = v;
      ordered_json item{{"id", r.id},
                        {"citation", r.citation},
                        {"description", r.description},
                        {"defaults", defaults},
                        {"sampler_box", r.sampler_box}};
      item["pinnable"] = r.pin ? ordered_json(r.pin->unknown) : ordered_json(nullptr);
      arr.push_back(item);
    }
    text = arr.dump(2) + "\n";
  } else {
    for (const auto& r : registry()) {
      text += r.id + "  [" + r.citation + "]\n";
      text += "    " + r.description + "\n";
      text += "    defaults: " + point_text(r.defaults) + "\n";
      if (r.pin) text += "    pinnable: " + r.pin->unknown + "\n";
    }
  }
  return emit(cfg, text, out, err) ? kExitOk : kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiprecision hypergeometric functions and Feynman integrals: evaluate, verify "
               "identities, sweep, and pin hidden arguments.",
               "feynhyper"};
  app.require_subcommand(1);
  app.fallthrough();
  CliConfig cfg;
  std::string format = "json";
  std::string out_path;
  app.add_option("--digits", cfg.digits, "target precision in decimal digits")
      ->check(CLI::Range(10, 1000));
  app.add_option("--seed", cfg.seed, "sampler seed");
  app.add_option("--out", out_path, "write the result to this file");
  app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  std::string name, id;
  std::vector<std::string> params;
  std::string method;
  int n = 0;

  auto* eval = app.add_subcommand("eval", "evaluate a function or integral at a point");
  eval->add_option("function", name, "2f1, 3f2, f1, f4, kdf, i2, i3 or imj3")->required();
  eval->add_option("params", params, "key=value decimal parameters");
  eval->add_option("--method", method, "evaluation method for i2, i3, imj3");

  auto* ver = app.add_subcommand("verify", "verify an identity at one point");
  ver->add_option("id", id)->required();
  ver->add_option("params", params, "key=value overrides of the default point");

  auto* swp = app.add_subcommand("sweep", "verify an identity on sampled points");
  swp->add_option("id", id)->required();
  auto* swp_n = swp->add_option("--n", n, "number of points")->default_val(10);

  auto* pin = app.add_subcommand("pin", "solve for the unknown RHS argument on sampled points");
  pin->add_option("id", id)->required();
  auto* pin_n = pin->add_option("--n", n, "number of points")->default_val(8);

  auto* lst = app.add_subcommand("list", "list the identity registry");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  (void)swp_n;
  (void)pin_n;
  cfg.format = format == "text" ? OutputFormat::Text : OutputFormat::Json;
  if (!out_path.empty()) cfg.output_path = out_path;
  const std::string command_line = "feynhyper " + join(args, " ");

  try {
    if (*eval)
      return cmd_eval(name, params, method.empty() ? std::nullopt : std::optional(method), cfg, out,
                      err);
    if (*ver) return cmd_verify(id, params, cfg, command_line, out, err);
    if (*swp) return cmd_sweep(id, n, cfg, command_line, out, err);
    if (*pin) return cmd_pin(id, n, cfg, command_line, out, err);
    if (*lst) return cmd_list(cfg, out, err);
  } catch (const UnknownIdentity& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NoBracket& e) {
    err << "error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace feynhyper
