#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <map>
#include <sstream>

#include "varconstrain/metrics.hpp"
#include "varconstrain/runner.hpp"
#include "varconstrain/schedule.hpp"

namespace py = pybind11;
using namespace varconstrain;

namespace {

RunConfig config_from(const std::string& problem, const std::string& method, const std::string& preset,
                      const std::map<std::string, std::string>& settings) {
  RunConfig c = preset_config(problem, parse_method(method), preset);
  for (const auto& [k, v] : settings) apply_setting(c, k, v);
  validate(c);
  return c;
}

py::dict errors_dict(const ErrorTriple& e) {
  py::dict d;
  d["absolute_error"] = e.absolute;
  d["relative_objective_error"] = e.relative_objective;
  d["constraint_error"] = e.constraint;
  d["relative_fallback"] = e.relative_fallback;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("param_count", [](const std::string& spec) { return param_count(NetworkSpec::parse(spec)); });
  m.def("init_params", [](const std::string& spec, std::uint64_t seed) {
    return init(NetworkSpec::parse(spec), seed).params;
  });
  m.def("evaluate", [](const std::string& spec, std::vector<double> params, std::vector<double> x) {
    return evaluate(Network{NetworkSpec::parse(spec), std::move(params)}, x);
  });

  m.def("gauss_legendre", [](int n, double a, double b) {
    const Rule1D r = gauss_legendre(n, a, b);
    return py::make_tuple(r.nodes, r.weights);
  }, py::arg("n"), py::arg("a") = -1.0, py::arg("b") = 1.0);

  m.def("penalty_mu", [](std::int64_t k, double mu1, double r, double mu_max) {
    return mu(PenaltySchedule{mu1, r, mu_max}, k);
  }, py::arg("k"), py::arg("mu1") = 100.0, py::arg("r") = 1.01, py::arg("mu_max") = 5000.0);
  m.def("learning_rate", [](std::int64_t t, double L0, double D0, std::int64_t E, std::int64_t P,
                            std::optional<double> L1, std::optional<double> D1, double mu1, double r,
                            double mu_max) {
    return delta(make_lr_schedule(L0, D0, L1, D1, E, P, PenaltySchedule{mu1, r, mu_max}), t);
  }, py::arg("t"), py::arg("L0"), py::arg("D0"), py::arg("E"), py::arg("P"),
     py::arg("L1") = py::none(), py::arg("D1") = py::none(), py::arg("mu1") = 100.0,
     py::arg("r") = 1.01, py::arg("mu_max") = 5000.0);

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("name", &Problem::name)
      .def_property_readonly("truth_objective", &Problem::truth_objective)
      .def_property_readonly("net_in_dim", &Problem::net_in_dim)
      .def_property_readonly("net_out_dim", &Problem::net_out_dim)
      .def("truth", [](const Problem& p, std::vector<double> x) { return p.truth(x); })
      .def("truth_errors", [](const Problem& p) { return errors_dict(evaluate_errors(p, p.truth_net())); })
      .def("errors", [](const Problem& p, const std::string& spec, std::vector<double> params) {
        const Network net{NetworkSpec::parse(spec), std::move(params)};
        if (net.params.size() != param_count(net.spec)) throw UsageError("parameter count does not match spec");
        return errors_dict(evaluate_errors(p, net_eval(net)));
      });
  m.def("make_problem", [](const std::string& name) { return make_problem(name); });

  m.def("preset", [](const std::string& problem, const std::string& method, const std::string& preset) {
    std::map<std::string, std::string> out;
    for (auto& [k, v] : to_settings(preset_config(problem, parse_method(method), preset))) out[k] = v;
    return out;
  }, py::arg("problem"), py::arg("method"), py::arg("preset") = "desk");

  m.def("run", [](const std::string& problem, const std::string& method, const std::filesystem::path& out,
                  const std::map<std::string, std::string>& settings, const std::string& preset, bool quiet) {
    const RunConfig c = config_from(problem, method, preset, settings);
    py::gil_scoped_release release;
    std::ostringstream sink;
    return run_experiment(c, out, quiet ? static_cast<std::ostream&>(sink) : std::cerr);
  }, py::arg("problem"), py::arg("method"), py::arg("out"),
     py::arg("settings") = std::map<std::string, std::string>{}, py::arg("preset") = "desk",
     py::arg("quiet") = true);

  m.def("resume", [](const std::filesystem::path& out, bool quiet) {
    py::gil_scoped_release release;
    std::ostringstream sink;
    return resume_experiment(out, quiet ? static_cast<std::ostream&>(sink) : std::cerr);
  }, py::arg("out"), py::arg("quiet") = true);

  m.def("report", [](const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out) {
    return write_report(runs, out);
  });

  m.def("verify", [] {
    std::vector<py::tuple> out;
    for (const auto& r : verify_invariants()) out.push_back(py::make_tuple(r.name, r.passed, r.detail));
    return out;
  });
}
