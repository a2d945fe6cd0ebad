#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tte/error.hpp"
#include "tte/harness.hpp"
#include "tte/identification.hpp"
#include "tte/io.hpp"

namespace py = pybind11;
using namespace tte;

namespace {

DgpTable dgp_for(const std::string& scenario, const std::string& dgp_json) {
  if (dgp_json.empty()) return default_dgp(parse_scenario(scenario));
  return io::dgp_from_json(io::json::parse(dgp_json));
}

NodeSet node_set(const std::vector<std::string>& names) {
  NodeSet out;
  for (const auto& n : names) out.insert(NodeLabel::parse(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_tte, m) {
  m.doc() = "Native core of the tte package";

  static py::exception<Error> tte_error(m, "TteError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string text = std::string(error_code_name(e.code())) + ": " + e.what();
      PyErr_SetString(tte_error.ptr(), text.c_str());
    } catch (const io::json::exception& e) {
      PyErr_SetString(tte_error.ptr(), (std::string("PARSE_ERROR: ") + e.what()).c_str());
    }
  });

  m.def("true_ate", [](const std::string& scenario, const std::string& treat, const std::string& control,
                       const std::string& dgp) {
    return true_ate(dgp_for(scenario, dgp), Regime::parse(treat), Regime::parse(control));
  });

  m.def("ccw_asymptotic", [](const std::string& scenario, const std::string& treat, const std::string& control,
                             const std::string& convention, const std::string& dgp) {
    return ccw_asymptotic(dgp_for(scenario, dgp), Regime::parse(treat), Regime::parse(control),
                          parse_weight_convention(convention));
  });

  m.def("simulate", [](const std::string& scenario, std::size_t n, std::uint64_t seed, const std::string& dgp) {
    Cohort cohort;
    {
      py::gil_scoped_release release;
      cohort = sample_cohort(dgp_for(scenario, dgp), n, seed, workers_from_env());
    }
    std::ostringstream out;
    io::write_cohort_csv(out, cohort);
    return out.str();
  });

  m.def("estimate", [](const std::string& csv, const std::string& scenario, const std::string& estimator,
                       const std::string& treat, const std::string& control, const std::string& convention) {
    std::istringstream in(csv);
    const auto cohort = io::read_cohort_csv(in, parse_scenario(scenario));
    const auto x = Regime::parse(treat), y = Regime::parse(control);
    const auto e = parse_estimator(estimator) == EstimatorKind::Npmle
                       ? npmle_ate(cohort, x, y)
                       : ccw_ate(cohort, x, y, parse_weight_convention(convention));
    return io::to_json(e).dump();
  });

  m.def("identification_report", [](const std::string& scenario, int horizon) {
    return io::to_json(identification_report(parse_scenario(scenario), horizon)).dump();
  });

  m.def(
      "exchangeability_table",
      [](const std::string& scenario, int horizon, const std::string& regime) {
        return exchangeability_table(parse_scenario(scenario), horizon, Regime::parse(regime));
      },
      py::arg("scenario") = "A", py::arg("horizon") = 3, py::arg("regime") = "always",
      "Rows i = 1..T, columns k = 1..T; True where exchangeability holds.");

  m.def("parameter_count", &parameter_count, py::arg("control_periods"), py::arg("subgroups"),
        py::arg("treat_periods"), py::arg("levels"));

  m.def("bias_study", [](const std::string& config_json, unsigned workers) {
    const auto config = io::study_config_from_json(io::json::parse(config_json));
    BiasReport report;
    {
      py::gil_scoped_release release;
      report = run_bias_study(config, workers);
    }
    return io::to_json(report).dump();
  });

  m.def("to_dot", [](const std::string& scenario, int horizon, const std::string& variant, const std::string& regime) {
    const auto kind = parse_scenario(scenario);
    if (variant == "full") return to_dot(build_trial_graph(kind, horizon, true));
    if (variant == "simplified") return to_dot(build_trial_graph(kind, horizon, false));
    if (variant == "amwn") return to_dot(build_amwn(kind, horizon, Regime::parse(regime)));
    throw Error(ErrorCode::InvalidArgument, "variant must be full, simplified or amwn");
  });

  m.def("m_separated", [](const std::string& dot, const std::vector<std::string>& a, const std::vector<std::string>& b,
                          const std::vector<std::string>& z) {
    return m_separated(parse_dot(dot), node_set(a), node_set(b), node_set(z));
  });
}
