// tte: command-line front end.
//
// Exit status: 0 success, 1 invalid input, 2 estimation failure. Errors are
// written to stderr as `error[CODE]: message`.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tte/error.hpp"
#include "tte/harness.hpp"
#include "tte/identification.hpp"
#include "tte/io.hpp"

using namespace tte;

namespace {

constexpr int kInvalidInput = 1;
constexpr int kEstimationFailure = 2;

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text << std::flush;
  else
    io::write_file(path, text);
}

std::string table_text(const std::vector<std::vector<bool>>& table) {
  std::ostringstream out;
  out << "i\\k";
  for (std::size_t k = 1; k <= table.size(); ++k) out << ' ' << k;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << i + 1 << "  ";
    for (bool cell : table[i]) out << ' ' << (cell ? 'T' : 'F');
    out << '\n';
  }
  return out.str();
}

std::string premise_text(const PremiseReport& r) {
  std::ostringstream out;
  out << "scenario " << scenario_name(r.scenario) << ", T = " << r.horizon << '\n';
  out << "k  rule2  rule3\n";
  for (const auto& p : r.periods)
    out << p.period << "  " << (p.rule2 ? "true " : "false") << "  " << (p.rule3 ? "true" : "false") << '\n';
  out << "identified: " << (r.identified ? "yes" : "no") << '\n';
  return out.str();
}

struct Options {
  std::string scenario = "A";
  std::string dgp_path;
  std::string out;
  std::size_t n = 1000;
  std::uint64_t seed = 20240917;
  std::string input;
  std::string estimator = "npmle";
  std::string treat = "always";
  std::string control = "never";
  std::string convention = "lagged";
  std::string clone_rows;
  std::string config;
  std::string estimates_csv;
  int horizon = 3;
  bool json = false;
  std::string regime = "always";
  std::string variant = "full";
  long long control_periods = 1, subgroups = 1, treat_periods = 1, levels = 1;
};

io::json read_json(const std::string& path) {
  auto parsed = io::json::parse(io::read_file(path), nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::ParseError, path + " is not valid JSON");
  return parsed;
}

DgpTable load_dgp(const Options& o) {
  if (o.dgp_path.empty()) return default_dgp(parse_scenario(o.scenario));
  return io::dgp_from_json(read_json(o.dgp_path));
}

int run_simulate(const Options& o) {
  const auto dgp = load_dgp(o);
  const auto cohort = sample_cohort(dgp, o.n, o.seed, workers_from_env());
  std::ostringstream out;
  io::write_cohort_csv(out, cohort);
  emit(o.out, out.str());
  return 0;
}

int run_estimate(const Options& o) {
  const auto kind = parse_scenario(o.scenario);
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + o.input);
  const auto cohort = io::read_cohort_csv(in, kind);
  const auto treat = Regime::parse(o.treat), control = Regime::parse(o.control);
  const auto convention = parse_weight_convention(o.convention);
  const auto estimate = parse_estimator(o.estimator) == EstimatorKind::Npmle
                            ? npmle_ate(cohort, treat, control)
                            : ccw_ate(cohort, treat, control, convention);
  if (!o.clone_rows.empty()) {
    std::ostringstream rows;
    io::write_clone_rows_csv(rows, ccw_clone_rows(cohort, treat, control, convention));
    io::write_file(o.clone_rows, rows.str());
  }
  emit(o.out, io::to_json(estimate).dump(2) + "\n");
  return 0;
}

int run_bias_study_cmd(const Options& o) {
  auto config = io::study_config_from_json(read_json(o.config));
  if (!o.out.empty()) config.report_path = o.out;
  if (!o.estimates_csv.empty()) config.estimates_csv_path = o.estimates_csv;

  const auto report = run_bias_study(config, workers_from_env());
  emit(config.report_path, io::to_json(report).dump(2) + "\n");
  if (!config.estimates_csv_path.empty()) {
    std::ostringstream csv;
    io::write_estimates_csv(csv, report);
    io::write_file(config.estimates_csv_path, csv.str());
  }
  std::fprintf(stderr, "true ATE %.7f\n", report.true_ate);
  for (const auto& s : report.estimators)
    std::fprintf(stderr, "%-6s mean bias %+.4f pp  95%% CI [%+.4f, %+.4f] pp  failures %zu\n",
                 estimator_name(s.estimator), 100 * s.mean_bias, 100 * s.ci_lower, 100 * s.ci_upper, s.failures);
  std::fprintf(stderr, "runtime %.2f s\n", report.runtime_seconds);
  return 0;
}

int run_check_identification(const Options& o) {
  const auto report = identification_report(parse_scenario(o.scenario), o.horizon);
  if (!o.out.empty()) io::write_file(o.out, io::to_json(report).dump(2) + "\n");
  std::cout << (o.json ? io::to_json(report).dump(2) + "\n" : premise_text(report));
  return 0;
}

int run_check_exchangeability(const Options& o) {
  const auto table = exchangeability_table(parse_scenario(o.scenario), o.horizon, Regime::parse(o.regime));
  if (o.json)
    std::cout << io::json(table).dump() << '\n';
  else
    std::cout << table_text(table);
  return 0;
}

int run_param_count(const Options& o) {
  std::cout << parameter_count(o.control_periods, o.subgroups, o.treat_periods, o.levels) << '\n';
  return 0;
}

int run_export_graph(const Options& o) {
  const auto kind = parse_scenario(o.scenario);
  Admg g;
  if (o.variant == "full")
    g = build_trial_graph(kind, o.horizon, true);
  else if (o.variant == "simplified")
    g = build_trial_graph(kind, o.horizon, false);
  else if (o.variant == "amwn")
    g = build_amwn(kind, o.horizon, Regime::parse(o.regime));
  else
    throw Error(ErrorCode::InvalidArgument, "variant must be full, simplified or amwn");
  emit(o.out, to_dot(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-partitioned target trial emulation workbench"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Sample a cohort and write it as CSV");
  simulate->add_option("--scenario", o.scenario, "A or B")->capture_default_str();
  simulate->add_option("--dgp", o.dgp_path, "DGP tables as JSON (overrides --scenario)");
  simulate->add_option("-n,--patients", o.n, "Number of patients")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  simulate->add_option("-o,--out", o.out, "Output file (default stdout)");

  auto* estimate = app.add_subcommand("estimate", "Estimate the ATE from a cohort CSV");
  estimate->add_option("--scenario", o.scenario, "A or B")->capture_default_str();
  estimate->add_option("-i,--input", o.input, "Cohort CSV")->required();
  estimate->add_option("--estimator", o.estimator, "npmle or ccw")->capture_default_str();
  estimate->add_option("--treat", o.treat, "never|always|initiate:<i>|grace:<g>")->capture_default_str();
  estimate->add_option("--control", o.control, "never|always|initiate:<i>|grace:<g>")->capture_default_str();
  estimate->add_option("--convention", o.convention, "CCW row weights: lagged or current")->capture_default_str();
  estimate->add_option("--clone-rows", o.clone_rows, "Write the CCW clone rows to this CSV");
  estimate->add_option("-o,--out", o.out, "Output file (default stdout)");

  auto* study = app.add_subcommand("bias-study", "Run a replication study from a JSON config");
  study->add_option("-c,--config", o.config, "Study config JSON")->required();
  study->add_option("-o,--out", o.out, "Report JSON (default: config report_path, else stdout)");
  study->add_option("--estimates-csv", o.estimates_csv, "Per-replicate estimates CSV");

  auto* ident = app.add_subcommand("check-identification", "Evaluate the rule 2 / rule 3 premises");
  ident->add_option("--scenario", o.scenario, "A or B")->capture_default_str();
  ident->add_option("-T,--T", o.horizon, "Number of periods")->capture_default_str();
  ident->add_flag("--json", o.json, "Print JSON instead of a table");
  ident->add_option("-o,--out", o.out, "Also write the JSON report here");

  auto* exch = app.add_subcommand("check-exchangeability", "Exchangeability truth table over (i, k)");
  exch->add_option("--scenario", o.scenario, "A or B")->capture_default_str();
  exch->add_option("-T,--T", o.horizon, "Number of periods")->capture_default_str();
  exch->add_option("--regime", o.regime, "never|always|initiate:<i>|grace:<g>")->capture_default_str();
  exch->add_flag("--json", o.json, "Print a JSON array of rows");

  auto* params = app.add_subcommand("param-count", "Free parameters of the standardized estimand");
  params->add_option("--control", o.control_periods, "Control-arm periods")->required();
  params->add_option("--subgroups", o.subgroups, "Initiation subgroups")->required();
  params->add_option("--treat", o.treat_periods, "Treated-arm periods")->required();
  params->add_option("--c", o.levels, "Baseline levels |C|")->required();

  auto* graph = app.add_subcommand("export-graph", "Write a scenario graph as DOT");
  graph->add_option("--scenario", o.scenario, "A or B")->capture_default_str();
  graph->add_option("-T,--T", o.horizon, "Number of periods")->capture_default_str();
  graph->add_option("--variant", o.variant, "full, simplified or amwn")->capture_default_str();
  graph->add_option("--regime", o.regime, "Regime for the amwn variant")->capture_default_str();
  graph->add_option("-o,--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[" << error_code_name(ErrorCode::InvalidArgument) << "]: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*estimate) return run_estimate(o);
    if (*study) return run_bias_study_cmd(o);
    if (*ident) return run_check_identification(o);
    if (*exch) return run_check_exchangeability(o);
    if (*params) return run_param_count(o);
    if (*graph) return run_export_graph(o);
  } catch (const Error& e) {
    std::cerr << "error[" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return is_estimation_failure(e.code()) ? kEstimationFailure : kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error[" << error_code_name(ErrorCode::InvalidArgument) << "]: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}
