#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tte/dgp.hpp"
#include "tte/estimators.hpp"

namespace tte {

enum class EstimatorKind { Npmle, Ccw };

const char* estimator_name(EstimatorKind e);  // "npmle" / "ccw"
EstimatorKind parse_estimator(std::string_view text);

struct StudyConfig {
  ScenarioKind scenario = ScenarioKind::NoWithinPeriodTreatmentEffect;
  std::size_t n_replicates = 1000;
  std::size_t n_patients = 1000;
  std::uint64_t master_seed = 20240917;
  std::vector<EstimatorKind> estimators{EstimatorKind::Npmle, EstimatorKind::Ccw};
  WeightConvention weight_convention = WeightConvention::Lagged;
  std::size_t bootstrap_iterations = 1000;
  Regime treat = Regime::always_from_start();
  Regime control = Regime::never();
  /// Defaults to default_dgp(scenario).
  std::optional<DgpTable> dgp;
  std::string report_path;
  std::string estimates_csv_path;

  /// Throws Error(InvalidArgument) on zero counts, an empty estimator list,
  /// a DGP of the wrong scenario or regimes outside its horizon.
  void validate() const;
  DgpTable resolved_dgp() const;
};

struct EstimatorSummary {
  EstimatorKind estimator = EstimatorKind::Npmle;
  std::vector<std::optional<double>> estimates;  // by replicate; empty on failure
  double mean_bias = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::size_t failures = 0;
};

struct BiasReport {
  StudyConfig config;
  double true_ate = 0.0;
  std::vector<EstimatorSummary> estimators;
  double runtime_seconds = 0.0;

  const EstimatorSummary& summary(EstimatorKind e) const;
};

/// Seed of replicate r: substream_seed(master_seed, r).
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate);

/// Linear-interpolation percentile (q in [0, 1]) of sorted data.
double percentile(std::span<const double> sorted, double q);

/// Percentile bootstrap of the mean: resample `errors` with replacement
/// `iterations` times and take the (1-level)/2 and (1+level)/2 quantiles of
/// the resampled means.
std::pair<double, double> bootstrap_mean_ci(std::span<const double> errors, std::size_t iterations,
                                            std::uint64_t seed, double level = 0.95);

/// Simulates every replicate, runs the selected estimators and summarizes
/// their errors against the true ATE. Estimation failures in individual
/// replicates are counted; Error(AllReplicatesFailed) if an estimator never
/// succeeds. The result does not depend on `workers`.
BiasReport run_bias_study(const StudyConfig& config, unsigned workers = 1);

/// Worker count from TTE_WORKERS, defaulting to the hardware concurrency.
unsigned workers_from_env();

/// Free parameters of the standardized estimand when a control arm with
/// `control_periods` hazards is compared to `subgroups` initiation subgroups
/// with `treat_periods` hazards each, over `c_levels` baseline levels. The
/// period-1 hazards shared by both arms offset the |C| - 1 parameters of
/// the baseline distribution.
long long parameter_count(long long control_periods, long long subgroups, long long treat_periods,
                          long long c_levels);

}  // namespace tte
