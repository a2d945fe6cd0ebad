#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tte/dgp.hpp"
#include "tte/estimators.hpp"
#include "tte/harness.hpp"
#include "tte/identification.hpp"

namespace tte::io {

using nlohmann::json;

// Cohort CSV: header `id,period,x,y`, one row per patient-period, x in
// {0,1,u}. A trailing `c` column carries the baseline level and is written
// only when some patient has a nonzero level.
void write_cohort_csv(std::ostream& out, const Cohort& cohort);
Cohort read_cohort_csv(std::istream& in, ScenarioKind scenario);

void write_clone_rows_csv(std::ostream& out, const std::vector<CloneRow>& rows);

/// `replicate,seed,estimator,estimate,error`; failed replicates leave the
/// last two fields empty.
void write_estimates_csv(std::ostream& out, const BiasReport& report);

/// Splits one CSV record (RFC 4180 quoting).
std::vector<std::string> split_csv_line(const std::string& line);

json to_json(const DgpTable& dgp);
DgpTable dgp_from_json(const json& j);

json to_json(const AteEstimate& estimate);
json to_json(const PremiseReport& report);

/// Runtime is left out so identical studies serialize identically.
json to_json(const BiasReport& report);

json to_json(const StudyConfig& config);
/// Missing keys keep the StudyConfig defaults.
StudyConfig study_config_from_json(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace tte::io
