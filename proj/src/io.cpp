#include "tte/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tte/error.hpp"

namespace tte::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

long long parse_int(const std::string& field, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(field, &used);
  } catch (const std::exception&) {
    parse_error(std::string("bad ") + what + " '" + field + "'");
  }
  if (used != field.size()) parse_error(std::string("bad ") + what + " '" + field + "'");
  return v;
}

template <class F>
auto json_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_error(std::string("JSON: ") + e.what());
  }
}

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a non-negative integer");
  return v.get<std::size_t>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const ArmDiagnostics& d) {
  json j{{"regime", d.regime}, {"at_risk", d.at_risk}, {"weighted_at_risk", d.weighted_at_risk}};
  if (d.weights)
    j["weights"] = {{"min", d.weights->min}, {"max", d.weights->max}, {"mean", d.weights->mean}};
  else
    j["weights"] = nullptr;
  return j;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) parse_error("unterminated quote in CSV record");
  return fields;
}

void write_cohort_csv(std::ostream& out, const Cohort& cohort) {
  const bool strata = std::any_of(cohort.trajectories.begin(), cohort.trajectories.end(),
                                  [](const Trajectory& t) { return t.stratum != 0; });
  out << "id,period,x,y" << (strata ? ",c" : "") << '\n';
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& traj = cohort.trajectories[i];
    for (int t = 1; t <= traj.horizon(); ++t) {
      out << i << ',' << t << ',' << treatment_char(traj.x[t - 1]) << ','
          << static_cast<int>(traj.y[t - 1]);
      if (strata) out << ',' << traj.stratum;
      out << '\n';
    }
  }
}

Cohort read_cohort_csv(std::istream& in, ScenarioKind scenario) {
  std::string line;
  if (!std::getline(in, line)) parse_error("cohort CSV is empty");
  const auto header = split_csv_line(line);
  const bool strata = header.size() == 5 && header[4] == "c";
  if (!(header.size() == 4 || strata) || header[0] != "id" || header[1] != "period" ||
      header[2] != "x" || header[3] != "y")
    parse_error("cohort CSV header must be id,period,x,y[,c]");

  std::map<long long, std::size_t> slot;  // id -> position of first appearance
  std::vector<std::map<int, std::pair<Treatment, std::uint8_t>>> cells;
  std::vector<int> levels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    const auto id = parse_int(f[0], "id");
    const auto period = parse_int(f[1], "period");
    if (period < 1 || period > DgpTable::kMaxHorizon)
      parse_error("line " + std::to_string(line_no) + ": period out of range");
    Treatment x;
    if (f[2] == "0") x = Treatment::None;
    else if (f[2] == "1") x = Treatment::Given;
    else if (f[2] == "u") x = Treatment::Unclear;
    else parse_error("line " + std::to_string(line_no) + ": x must be 0, 1 or u");
    if (f[3] != "0" && f[3] != "1") parse_error("line " + std::to_string(line_no) + ": y must be 0 or 1");
    const int level = strata ? static_cast<int>(parse_int(f[4], "c")) : 0;

    auto [it, inserted] = slot.try_emplace(id, cells.size());
    if (inserted) {
      cells.emplace_back();
      levels.push_back(level);
    } else if (levels[it->second] != level) {
      parse_error("patient " + std::to_string(id) + " has more than one baseline level");
    }
    auto& row = cells[it->second];
    if (!row.emplace(static_cast<int>(period), std::pair{x, static_cast<std::uint8_t>(f[3] == "1")}).second)
      parse_error("patient " + std::to_string(id) + " repeats period " + std::to_string(period));
  }
  if (cells.empty()) parse_error("cohort CSV has no rows");

  Cohort cohort{scenario, 0, {}};
  const int horizon = static_cast<int>(cells.front().size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Trajectory traj;
    traj.stratum = levels[i];
    int expected = 1;
    for (const auto& [period, value] : cells[i]) {
      if (period != expected) parse_error("patient rows must cover periods 1..T without gaps");
      traj.x.push_back(value.first);
      traj.y.push_back(value.second);
      ++expected;
    }
    validate_trajectory(traj, scenario, horizon);
    cohort.trajectories.push_back(std::move(traj));
  }
  return cohort;
}

void write_clone_rows_csv(std::ostream& out, const std::vector<CloneRow>& rows) {
  out << "id,arm,period,at_risk,event,weight\n";
  for (const auto& r : rows)
    out << r.patient << ',' << r.arm << ',' << r.period << ',' << (r.at_risk ? 1 : 0) << ','
        << (r.event ? 1 : 0) << ',' << json(r.weight).dump() << '\n';
}

void write_estimates_csv(std::ostream& out, const BiasReport& report) {
  out << "replicate,seed,estimator,estimate,error\n";
  const auto n = report.config.n_replicates;
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& s : report.estimators) {
      out << r << ',' << replicate_seed(report.config.master_seed, r) << ','
          << estimator_name(s.estimator) << ',';
      if (s.estimates[r])
        out << json(*s.estimates[r]).dump() << ',' << json(*s.estimates[r] - report.true_ate).dump();
      else
        out << ',';
      out << '\n';
    }
  }
}

json to_json(const DgpTable& dgp) {
  return {{"scenario", scenario_name(dgp.kind())},
          {"horizon", dgp.horizon()},
          {"hazard", dgp.hazard_table()},
          {"propensity", dgp.propensity_table()}};
}

DgpTable dgp_from_json(const json& j) {
  return json_guard([&] {
    const auto kind = parse_scenario(j.at("scenario").get<std::string>());
    auto hazard = j.at("hazard").get<std::vector<std::vector<double>>>();
    auto propensity = j.at("propensity").get<std::vector<std::vector<double>>>();
    if (j.contains("horizon") && j.at("horizon").get<int>() != static_cast<int>(hazard.size()))
      throw Error(ErrorCode::InvalidArgument, "DGP horizon does not match its tables");
    return DgpTable::from_tables(kind, std::move(hazard), std::move(propensity));
  });
}

json to_json(const AteEstimate& e) {
  return {{"estimator", e.estimator},
          {"ate", e.ate},
          {"survival_treat", e.survival_treat},
          {"survival_control", e.survival_control},
          {"diagnostics", {{"treat", to_json(e.treat)}, {"control", to_json(e.control)}}}};
}

json to_json(const PremiseReport& r) {
  json periods = json::array();
  for (const auto& p : r.periods) periods.push_back({{"k", p.period}, {"rule2", p.rule2}, {"rule3", p.rule3}});
  return {{"scenario", scenario_name(r.scenario)},
          {"horizon", r.horizon},
          {"identified", r.identified},
          {"periods", periods}};
}

json to_json(const StudyConfig& c) {
  json estimators = json::array();
  for (auto e : c.estimators) estimators.push_back(estimator_name(e));
  json j{{"scenario", scenario_name(c.scenario)},
         {"n_replicates", c.n_replicates},
         {"n_patients", c.n_patients},
         {"master_seed", c.master_seed},
         {"estimators", estimators},
         {"weight_convention", weight_convention_name(c.weight_convention)},
         {"bootstrap_iterations", c.bootstrap_iterations},
         {"treat", c.treat.to_string()},
         {"control", c.control.to_string()}};
  if (c.dgp) j["dgp"] = to_json(*c.dgp);
  return j;
}

StudyConfig study_config_from_json(const json& j) {
  return json_guard([&] {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "study config must be a JSON object");
    StudyConfig c;
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario").get<std::string>());
    if (j.contains("n_replicates")) c.n_replicates = get_count(j, "n_replicates");
    if (j.contains("n_patients")) c.n_patients = get_count(j, "n_patients");
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j.at("estimators")) c.estimators.push_back(parse_estimator(e.get<std::string>()));
    }
    if (j.contains("weight_convention"))
      c.weight_convention = parse_weight_convention(j.at("weight_convention").get<std::string>());
    if (j.contains("bootstrap_iterations"))
      c.bootstrap_iterations = get_count(j, "bootstrap_iterations");
    if (j.contains("treat")) c.treat = Regime::parse(j.at("treat").get<std::string>());
    if (j.contains("control")) c.control = Regime::parse(j.at("control").get<std::string>());
    if (j.contains("dgp")) c.dgp = dgp_from_json(j.at("dgp"));
    if (j.contains("report_path")) c.report_path = j.at("report_path").get<std::string>();
    if (j.contains("estimates_csv")) c.estimates_csv_path = j.at("estimates_csv").get<std::string>();
    c.validate();
    return c;
  });
}

json to_json(const BiasReport& r) {
  json estimators = json::object();
  for (const auto& s : r.estimators) {
    json estimates = json::array();
    for (const auto& v : s.estimates) estimates.push_back(optional_number(v));
    estimators[estimator_name(s.estimator)] = {{"mean_bias", s.mean_bias},
                                               {"ci_lower", s.ci_lower},
                                               {"ci_upper", s.ci_upper},
                                               {"failures", s.failures},
                                               {"estimates", estimates}};
  }
  return {{"config", to_json(r.config)}, {"true_ate", r.true_ate}, {"estimators", estimators}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace tte::io
