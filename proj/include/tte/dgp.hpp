#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tte/scenarios.hpp"

namespace tte {

/// Observed treatment in one period. Unclear marks a period whose treatment
/// is undefined because the patient was dead (or, in scenario A, died before
/// taking it).
enum class Treatment : std::uint8_t { None = 0, Given = 1, Unclear = 2 };

char treatment_char(Treatment x);  // '0', '1', 'u'

/// Treatment history as a bitmask: bit t-1 set iff X_t = 1.
using History = std::uint32_t;

constexpr History bit_of(int t) { return History{1} << (t - 1); }

/// Bits 1..upto of the history prescribed by a deterministic regime.
History regime_history(const Regime& regime, int upto);

struct Trajectory {
  std::vector<Treatment> x;
  std::vector<std::uint8_t> y;  // 1 = dead by the end of the period
  int stratum = 0;              // baseline covariate level C

  int horizon() const { return static_cast<int>(y.size()); }
  /// Bits 1..upto of the observed treatments (Unclear counts as 0).
  History history(int upto) const;
  /// Period of death, or 0 if alive at the end.
  int death_period() const;

  bool operator==(const Trajectory&) const = default;
};

/// Throws Error(InvalidArgument) if `traj` breaks the encoding rules of the
/// scenario (monotone death, placement of the Unclear value).
void validate_trajectory(const Trajectory& traj, ScenarioKind kind, int horizon);

/// Per-period conditional probabilities of one data-generating process.
///
/// hazard(k, h)     = P(Y_k = 1 | Y_{k-1} = 0, history), where the history is
///                    X_{<k} in scenario A and X_{<=k} in scenario B.
/// propensity(k, h) = P(X_k = 1 | alive, X_{<k} = h). In scenario A the
///                    patient must have survived period k, in B only k-1.
class DgpTable {
 public:
  static constexpr int kMaxHorizon = 24;

  using Formula = std::function<double(int period, History history)>;

  /// Evaluates the formulas on every parent configuration and validates that
  /// each value is a probability.
  static DgpTable materialize(ScenarioKind kind, int horizon, const Formula& hazard,
                              const Formula& propensity);

  /// Tables indexed [k-1][history]; sizes must match hazard_width/propensity_width.
  static DgpTable from_tables(ScenarioKind kind, std::vector<std::vector<double>> hazard,
                              std::vector<std::vector<double>> propensity);

  ScenarioKind kind() const { return kind_; }
  int horizon() const { return static_cast<int>(hazard_.size()); }

  double hazard(int k, History h) const { return hazard_[k - 1][h]; }
  double propensity(int k, History h) const { return propensity_[k - 1][h]; }

  const std::vector<std::vector<double>>& hazard_table() const { return hazard_; }
  const std::vector<std::vector<double>>& propensity_table() const { return propensity_; }

  /// Number of treatment bits the period-k hazard conditions on.
  static int hazard_bits(ScenarioKind kind, int k) {
    return kind == ScenarioKind::NoWithinPeriodTreatmentEffect ? k - 1 : k;
  }

 private:
  DgpTable(ScenarioKind kind, std::vector<std::vector<double>> hazard,
           std::vector<std::vector<double>> propensity);

  ScenarioKind kind_;
  std::vector<std::vector<double>> hazard_;
  std::vector<std::vector<double>> propensity_;
};

/// The three-period linear-probability processes of the simulation study.
DgpTable default_dgp(ScenarioKind kind);

struct Cohort {
  ScenarioKind scenario = ScenarioKind::NoWithinPeriodTreatmentEffect;
  std::uint64_t seed = 0;
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
};

/// Draws n independent patients. Patient i uses the substream
/// substream_seed(seed, i); within a period, scenario A draws Y_k and then
/// X_k if alive, scenario B draws X_k and then Y_k. The result does not
/// depend on `workers`.
Cohort sample_cohort(const DgpTable& dgp, std::size_t n, std::uint64_t seed, unsigned workers = 1);

struct WeightedTrajectory {
  Trajectory trajectory;
  double probability = 0.0;
};

/// Every trajectory with positive probability. Throws Error(SupportTooLarge)
/// past 10^6 support points.
std::vector<WeightedTrajectory> enumerate_distribution(const DgpTable& dgp);

/// S(k) = prod_{j<=k} (1 - hazard(j | regime history)) for k = 1..T; the
/// uniform average over components for grace regimes.
std::vector<double> counterfactual_survival(const DgpTable& dgp, const Regime& regime);

/// End-of-study survival difference between the two regimes.
double true_ate(const DgpTable& dgp, const Regime& treat, const Regime& control);

}  // namespace tte
