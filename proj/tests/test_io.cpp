#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "tte/error.hpp"
#include "tte/io.hpp"

using namespace tte;
using io::json;

namespace {

const auto kA = ScenarioKind::NoWithinPeriodTreatmentEffect;
const auto kB = ScenarioKind::NoWithinPeriodOutcomeEffect;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

Cohort read(const std::string& text, ScenarioKind kind) {
  std::istringstream in(text);
  return io::read_cohort_csv(in, kind);
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("cohort CSV round trip") {
  for (auto kind : {kA, kB}) {
    auto cohort = sample_cohort(default_dgp(kind), 250, 5);
    std::ostringstream out;
    io::write_cohort_csv(out, cohort);
    const auto text = out.str();
    CHECK(text.starts_with("id,period,x,y\n"));
    CHECK(count_lines(text) == 1 + 250 * 3);
    CHECK(read(text, kind).trajectories == cohort.trajectories);

    for (std::size_t i = 0; i < cohort.size(); ++i) cohort.trajectories[i].stratum = static_cast<int>(i % 3);
    std::ostringstream with_c;
    io::write_cohort_csv(with_c, cohort);
    CHECK(with_c.str().starts_with("id,period,x,y,c\n"));
    CHECK(read(with_c.str(), kind).trajectories == cohort.trajectories);
  }
}

TEST_CASE("cohort CSV reading") {
  // Rows may arrive in any order and with CRLF endings.
  const auto c = read("id,period,x,y\r\n7,2,u,1\r\n7,1,1,1\r\n3,1,0,0\r\n3,2,1,0\r\n", kB);
  REQUIRE(c.size() == 2);
  CHECK(c.trajectories[0].death_period() == 1);
  CHECK(c.trajectories[1].x[1] == Treatment::Given);

  CHECK(code_of([] { read("", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\n1,1,2,0\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\n1,1,0,3\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\n1,1,0,0\n1,1,0,0\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\n1,1,0,0\n1,3,0,0\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y\nx,1,0,0\n", kA); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read("id,period,x,y,c\n1,1,0,0,0\n1,2,0,0,1\n", kA); }) == ErrorCode::ParseError);
  // Well-formed rows that break the scenario's encoding.
  CHECK(code_of([] { read("id,period,x,y\n1,1,1,1\n", kA); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { read("id,period,x,y\n1,1,0,0\n1,2,0,0\n2,1,0,0\n", kA); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("CSV field splitting") {
  CHECK(io::split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(io::split_csv_line("\"a,b\",\"say \"\"hi\"\"\"") == std::vector<std::string>{"a,b", "say \"hi\""});
  CHECK(io::split_csv_line("") == std::vector<std::string>{""});
  CHECK(code_of([] { io::split_csv_line("\"open"); }) == ErrorCode::ParseError);
}

TEST_CASE("DGP JSON") {
  for (auto kind : {kA, kB}) {
    const auto dgp = default_dgp(kind);
    const auto back = io::dgp_from_json(json::parse(io::to_json(dgp).dump()));
    CHECK(back.kind() == kind);
    CHECK(back.hazard_table() == dgp.hazard_table());
    CHECK(back.propensity_table() == dgp.propensity_table());
  }
  CHECK(code_of([] { io::dgp_from_json(json::parse(R"({"scenario":"A"})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          io::dgp_from_json(json::parse(R"({"scenario":"A","hazard":[[0.1]],"propensity":[[1.5]]})"));
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          io::dgp_from_json(json::parse(R"({"scenario":"A","horizon":2,"hazard":[[0.1]],"propensity":[[0.5]]})"));
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("study config JSON") {
  const auto defaults = io::study_config_from_json(json::object());
  CHECK(defaults.n_replicates == 1000);
  CHECK(defaults.scenario == kA);

  const auto c = io::study_config_from_json(json::parse(R"({
    "scenario": "B", "n_replicates": 12, "n_patients": 99, "master_seed": 5,
    "estimators": ["ccw"], "weight_convention": "current", "bootstrap_iterations": 30,
    "treat": "initiate:2", "control": "never", "estimates_csv": "e.csv"})"));
  CHECK(c.scenario == kB);
  CHECK(c.n_replicates == 12);
  CHECK(c.n_patients == 99);
  CHECK(c.master_seed == 5);
  CHECK(c.estimators == std::vector{EstimatorKind::Ccw});
  CHECK(c.weight_convention == WeightConvention::CurrentPeriod);
  CHECK(c.treat == Regime::initiate_at(2));
  CHECK(c.estimates_csv_path == "e.csv");

  const auto again = io::study_config_from_json(io::to_json(c));
  CHECK(io::to_json(again) == io::to_json(c));

  auto with_dgp = io::to_json(c);
  with_dgp["dgp"] = io::to_json(default_dgp(kB));
  CHECK(io::study_config_from_json(with_dgp).dgp.has_value());

  CHECK(code_of([] { io::study_config_from_json(json::parse(R"({"n_replicates": -3})")); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { io::study_config_from_json(json::parse(R"({"n_replicates": 0})")); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { io::study_config_from_json(json::parse(R"({"scenario": 3})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::study_config_from_json(json::parse("[1]")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::study_config_from_json(json::parse(R"({"treat": "sometimes"})")); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("report JSON") {
  StudyConfig c;
  c.n_replicates = 5;
  c.n_patients = 200;
  c.bootstrap_iterations = 20;
  const auto r = run_bias_study(c);
  const auto j = io::to_json(r);
  CHECK_FALSE(j.contains("runtime_seconds"));
  CHECK(j.at("true_ate").get<double>() == r.true_ate);
  for (auto name : {"npmle", "ccw"}) {
    const auto& e = j.at("estimators").at(name);
    CHECK(e.at("estimates").size() == 5);
    CHECK(e.at("failures") == 0);
    CHECK(e.at("ci_lower").get<double>() <= e.at("ci_upper").get<double>());
  }
  CHECK(j.at("config").at("scenario") == "A");

  std::ostringstream csv;
  io::write_estimates_csv(csv, r);
  CHECK(csv.str().starts_with("replicate,seed,estimator,estimate,error\n"));
  CHECK(count_lines(csv.str()) == 1 + 5 * 2);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  const auto f = io::split_csv_line(line);
  REQUIRE(f.size() == 5);
  CHECK(std::stod(f[3]) == *r.estimators[0].estimates[0]);
  CHECK(std::stod(f[4]) == doctest::Approx(*r.estimators[0].estimates[0] - r.true_ate));
}

TEST_CASE("estimate and premise JSON") {
  const auto cohort = sample_cohort(default_dgp(kA), 500, 3);
  const auto j = io::to_json(ccw_ate(cohort, Regime::always_from_start(), Regime::never()));
  CHECK(j.at("estimator") == "ccw");
  CHECK(j.at("survival_treat").size() == 3);
  CHECK(j.at("diagnostics").at("treat").at("regime") == "always");
  CHECK(j.at("diagnostics").at("control").at("weights").at("min").get<double>() >= 1.0);
  CHECK(io::to_json(npmle_ate(cohort, Regime::always_from_start(), Regime::never()))
            .at("diagnostics").at("treat").at("weights").is_null());

  const auto p = io::to_json(identification_report(kB, 2));
  CHECK(p.at("identified") == true);
  CHECK(p.at("periods").size() == 2);
  CHECK(p.at("periods")[1].at("k") == 2);
}

TEST_CASE("clone rows CSV") {
  const auto cohort = sample_cohort(default_dgp(kB), 20, 3);
  std::ostringstream out;
  io::write_clone_rows_csv(out, ccw_clone_rows(cohort, Regime::always_from_start(), Regime::never()));
  CHECK(out.str().starts_with("id,arm,period,at_risk,event,weight\n"));
  CHECK(count_lines(out.str()) == 1 + 2 * 20 * 3);
}

TEST_CASE("files") {
  const auto path = (std::filesystem::temp_directory_path() / "tte_io_test.txt").string();
  io::write_file(path, "abc\n");
  CHECK(io::read_file(path) == "abc\n");
  std::filesystem::remove(path);
  CHECK(code_of([&] { io::read_file(path); }) == ErrorCode::IoError);
  CHECK(code_of([] { io::write_file("/nonexistent-dir/x", "y"); }) == ErrorCode::IoError);
}
