#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "feynhyper/cli.hpp"

namespace py = pybind11;
using namespace feynhyper;

namespace {

// Parameters arrive as str, int or float and are read through their str() form,
// so "0.1" stays the decimal 0.1 rather than the nearest double.
Real param(const py::handle& h) {
  return Real(std::string_view(py::str(h).cast<std::string>()));
}

struct Value {
  std::string value;
  std::string abs_err;
  int digits;
};

template <class Fn>
Value evaluate(int digits, Fn&& fn) {
  const auto ctx = PrecisionContext::for_digits(digits);
  PrecisionScope scope(ctx.working_digits());
  const NumValue v = fn(ctx);
  return {format_real(v.value, digits), format_real(v.abs_err, 3), digits};
}

template <class Method, class Parse>
std::optional<Method> method_arg(const std::optional<std::string>& name, Parse parse) {
  if (!name) return std::nullopt;
  auto m = parse(*name);
  if (!m) throw std::invalid_argument("unknown method '" + *name + "'");
  return m;
}

Point to_point(const py::dict& d) {
  Point p;
  for (const auto& [k, v] : d) p[py::str(k).cast<std::string>()] = py::str(v).cast<std::string>();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiprecision hypergeometric functions, Feynman integrals and identity checks.";
  m.attr("__version__") = kToolVersion;

  auto base = py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);
  py::register_exception<PoleError>(m, "PoleError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<QuadFailure>(m, "QuadFailure", base.ptr());
  py::register_exception<NoBracket>(m, "NoBracket", base.ptr());
  py::register_exception<UnknownIdentity>(m, "UnknownIdentity", PyExc_KeyError);

  py::class_<Value>(m, "Value")
      .def_readonly("value", &Value::value)
      .def_readonly("abs_err", &Value::abs_err)
      .def_readonly("digits", &Value::digits)
      .def("__float__", [](const Value& v) { return std::stod(v.value); })
      .def("__str__", [](const Value& v) { return v.value; })
      .def("__repr__", [](const Value& v) {
        return "Value(" + v.value + " +/- " + v.abs_err + ")";
      });

  m.def(
      "hyp2f1",
      [](py::object a, py::object b, py::object c, py::object z, int digits) {
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          return hyp2f1({param(a), param(b), param(c)}, param(z), ctx);
        });
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"), py::arg("digits") = 50);

  m.def(
      "hyp3f2",
      [](py::object a1, py::object a2, py::object a3, py::object b1, py::object b2, py::object z,
         int digits) {
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          return hyp3f2({param(a1), param(a2), param(a3), param(b1), param(b2)}, param(z), ctx);
        });
      },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("b1"), py::arg("b2"), py::arg("z"),
      py::arg("digits") = 50);

  m.def(
      "appell_f1",
      [](py::object a, py::object b, py::object bp, py::object c, py::object w, py::object z,
         int digits) {
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          return appell_f1({param(a), param(b), param(bp), param(c)}, param(w), param(z), ctx);
        });
      },
      py::arg("a"), py::arg("b"), py::arg("bp"), py::arg("c"), py::arg("w"), py::arg("z"),
      py::arg("digits") = 50);

  m.def(
      "appell_f4",
      [](py::object a, py::object b, py::object c1, py::object c2, py::object x, py::object y,
         int digits) {
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          return appell_f4({param(a), param(b), param(c1), param(c2)}, param(x), param(y), ctx);
        });
      },
      py::arg("a"), py::arg("b"), py::arg("c1"), py::arg("c2"), py::arg("x"), py::arg("y"),
      py::arg("digits") = 50);

  m.def(
      "kdf_f210",
      [](py::object alpha, py::object nu1, py::object nu2, py::object x, py::object y,
         int digits) {
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          return kdf_f210({param(alpha), param(nu1), param(nu2)}, param(x), param(y), ctx);
        });
      },
      py::arg("alpha"), py::arg("nu1"), py::arg("nu2"), py::arg("x"), py::arg("y"),
      py::arg("digits") = 50);

  m.def(
      "i2",
      [](py::object nu1, py::object nu2, py::object d, py::object m1sq, py::object m2sq,
         py::object s12, std::optional<std::string> method, int digits) {
        auto chosen = method_arg<BubbleMethod>(method, parse_bubble_method);
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          BubbleKinematics k{param(nu1), param(nu2), param(d), param(m1sq), param(m2sq), param(s12)};
          validate(k, ctx);
          if (chosen) return i2(k, *chosen, ctx);
          for (auto mth : {BubbleMethod::F1Form, BubbleMethod::F4Form, BubbleMethod::KdFForm,
                           BubbleMethod::EqualMass3F2})
            if (i2_admits(k, mth, ctx)) return i2(k, mth, ctx);
          return i2(k, BubbleMethod::Quadrature, ctx);
        });
      },
      py::arg("nu1"), py::arg("nu2"), py::arg("d"), py::arg("m1sq"), py::arg("m2sq"),
      py::arg("s12"), py::arg("method") = py::none(), py::arg("digits") = 50);

  m.def(
      "i3",
      [](py::object d, py::object msq, py::object s12, py::object s13,
         std::optional<std::string> method, int digits) {
        auto chosen = method_arg<VertexMethod>(method, parse_vertex_method);
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          VertexKinematics k{param(msq), param(s12), param(s13), param(d)};
          validate(k, ctx);
          return i3(k, chosen.value_or(VertexMethod::F1Formula), ctx);
        });
      },
      py::arg("d"), py::arg("msq"), py::arg("s12"), py::arg("s13"),
      py::arg("method") = py::none(), py::arg("digits") = 50);

  m.def(
      "im_j3",
      [](py::object x, py::object msq, py::object d, std::optional<std::string> method,
         int digits) {
        auto chosen = method_arg<SunriseMethod>(method, parse_sunrise_method);
        return evaluate(digits, [&](const PrecisionContext& ctx) {
          SunriseKinematics k{param(x), param(msq), param(d)};
          return im_j3(k, chosen.value_or(SunriseMethod::Series2F1), ctx);
        });
      },
      py::arg("x"), py::arg("msq"), py::arg("d"), py::arg("method") = py::none(),
      py::arg("digits") = 50);

  m.def("identity_ids", [] {
    std::vector<std::string> ids;
    for (const auto& r : registry()) ids.push_back(r.id);
    return ids;
  });

  m.def(
      "identity_defaults", [](const std::string& id) { return find_identity(id).defaults; },
      py::arg("id"));

  m.def(
      "verify_json",
      [](const std::string& id, py::dict point, int digits, std::uint64_t seed) {
        const auto ctx = PrecisionContext::for_digits(digits);
        Point p = find_identity(id).defaults;
        for (const auto& [k, v] : to_point(point)) p[k] = v;
        return report_to_json(verify(id, p, ctx, seed)).dump();
      },
      py::arg("id"), py::arg("point"), py::arg("digits") = 50, py::arg("seed") = 0);

  m.def(
      "sweep_json",
      [](const std::string& id, int n, std::uint64_t seed, int digits) {
        const auto ctx = PrecisionContext::for_digits(digits);
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : sweep(id, n, seed, ctx)) arr.push_back(report_to_json(r));
        return arr.dump();
      },
      py::arg("id"), py::arg("n"), py::arg("seed") = 1, py::arg("digits") = 50);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
