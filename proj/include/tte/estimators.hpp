#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tte/dgp.hpp"

namespace tte {

struct StratumKey {
  int period = 0;
  History history = 0;
  int stratum = 0;  // baseline level C

  auto operator<=>(const StratumKey&) const = default;
};

/// Weighted count of one stratum. Counts are patient masses, so population
/// inputs (exact probabilities) and plain cohorts share one code path.
struct StratumCount {
  double events = 0.0;
  double total = 0.0;

  bool defined() const { return total > 0.0; }
  std::optional<double> proportion() const {
    if (!defined()) return std::nullopt;
    return events / total;
  }
};

/// Saturated fits of every hazard and propensity stratum of a sample.
///
/// hazard:              deaths at k among patients alive at the start of k,
///                      by X_{<k} (scenario A) or X_{<=k} (scenario B).
/// propensity:          X_k = 1 among the scenario's own treatment risk set
///                      (period-k survivors in A, period-(k-1) survivors in B).
/// survivor_propensity: X_k = 1 among period-k survivors, by X_{<k}. This is
///                      what the CCW weights use in both scenarios.
struct StratumTable {
  ScenarioKind scenario = ScenarioKind::NoWithinPeriodTreatmentEffect;
  int horizon = 0;
  double total_mass = 0.0;
  std::map<int, double> stratum_mass;
  std::map<StratumKey, StratumCount> hazard;
  std::map<StratumKey, StratumCount> propensity;
  std::map<StratumKey, StratumCount> survivor_propensity;

  /// Missing strata come back as an undefined (zero-total) count.
  StratumCount hazard_at(int k, History h, int c = 0) const;
  StratumCount propensity_at(int k, History h, int c = 0) const;
  StratumCount survivor_propensity_at(int k, History h, int c = 0) const;
};

/// A sample of trajectories with per-trajectory masses (all 1 for a cohort).
class Sample {
 public:
  Sample(const Cohort& cohort);  // NOLINT: implicit by intent
  Sample(std::span<const WeightedTrajectory> population, ScenarioKind kind);

  ScenarioKind scenario() const { return scenario_; }
  int horizon() const { return horizon_; }
  std::size_t size() const { return rows_.size(); }
  const Trajectory& operator[](std::size_t i) const { return *rows_[i]; }
  double mass(std::size_t i) const { return mass_.empty() ? 1.0 : mass_[i]; }

 private:
  ScenarioKind scenario_;
  int horizon_ = 0;
  std::vector<const Trajectory*> rows_;
  std::vector<double> mass_;
};

StratumTable fit_strata(const Sample& sample);

enum class WeightConvention {
  /// Row at period t carries W_{t-1}; every uncensored-at-start row counts.
  Lagged,
  /// Row at period t carries W_t and rows censored at t drop out. The
  /// death-period factor uses the survivor propensity of the observed
  /// treatment, or 1 when that treatment is Unclear.
  CurrentPeriod,
};

const char* weight_convention_name(WeightConvention c);  // "lagged" / "current"
WeightConvention parse_weight_convention(std::string_view text);

struct WeightSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct ArmDiagnostics {
  std::string regime;
  std::vector<double> at_risk;           // unweighted mass per period
  std::vector<double> weighted_at_risk;  // CCW only; equals at_risk for npmle
  std::optional<WeightSummary> weights;  // CCW only
};

struct AteEstimate {
  std::string estimator;  // "npmle" or "ccw"
  std::vector<double> survival_treat;
  std::vector<double> survival_control;
  double ate = 0.0;
  ArmDiagnostics treat;
  ArmDiagnostics control;
};

/// Plug-in of the observed proportions into the product-form estimand,
/// standardized over the empirical distribution of C. Grace regimes average
/// their InitiateAt components. Throws Error(EmptyStratum) when a required
/// hazard stratum is empty.
AteEstimate npmle_ate(const Sample& sample, const Regime& treat, const Regime& control);

/// One clone-period record of the CCW pipeline.
struct CloneRow {
  std::size_t patient = 0;
  std::string arm;
  int period = 0;
  bool at_risk = false;       // alive at the start and uncensored before t
  bool event = false;         // death in t while at risk
  bool censored_now = false;  // first period incompatible with the arm
  double weight = 0.0;        // weight in the hazard fit; 0 if excluded
};

/// Cloning-censoring-weighting with saturated per-period hazards. Only
/// deterministic regimes are supported (Never, AlwaysFromStart, InitiateAt).
/// Throws Error(EmptyStratum) when a weight needs an empty propensity stratum
/// and Error(NoAtRiskRows) when an arm has no weighted mass at some period.
AteEstimate ccw_ate(const Sample& sample, const Regime& treat, const Regime& control,
                    WeightConvention convention = WeightConvention::Lagged);

/// The clone-level rows behind ccw_ate, treat arm first, for audit export.
std::vector<CloneRow> ccw_clone_rows(const Sample& sample, const Regime& treat,
                                     const Regime& control,
                                     WeightConvention convention = WeightConvention::Lagged);

/// Large-sample limit of ccw_ate: the same pipeline on the exact
/// distribution of `dgp`.
double ccw_asymptotic(const DgpTable& dgp, const Regime& treat, const Regime& control,
                      WeightConvention convention = WeightConvention::Lagged);

}  // namespace tte
