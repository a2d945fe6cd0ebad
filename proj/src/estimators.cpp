#include "tte/estimators.hpp"

#include <algorithm>
#include <limits>

#include "tte/error.hpp"

namespace tte {

namespace {

StratumCount lookup(const std::map<StratumKey, StratumCount>& m, int k, History h, int c) {
  auto it = m.find({k, h, c});
  return it == m.end() ? StratumCount{} : it->second;
}

std::string history_text(History h, int bits) {
  std::string s;
  for (int t = 1; t <= bits; ++t) s += (h & bit_of(t)) ? '1' : '0';
  return s.empty() ? "-" : s;
}

[[noreturn]] void empty_stratum(const char* what, int k, History h, int bits, int c) {
  throw Error(ErrorCode::EmptyStratum, std::string("EmptyStratum(") + what + ", k=" +
                                           std::to_string(k) + ", history=" +
                                           history_text(h, bits) + ", c=" + std::to_string(c) + ")");
}

}  // namespace

StratumCount StratumTable::hazard_at(int k, History h, int c) const {
  return lookup(hazard, k, h, c);
}
StratumCount StratumTable::propensity_at(int k, History h, int c) const {
  return lookup(propensity, k, h, c);
}
StratumCount StratumTable::survivor_propensity_at(int k, History h, int c) const {
  return lookup(survivor_propensity, k, h, c);
}

Sample::Sample(const Cohort& cohort) : scenario_(cohort.scenario) {
  if (cohort.trajectories.empty()) throw Error(ErrorCode::InvalidArgument, "empty cohort");
  horizon_ = cohort.trajectories.front().horizon();
  rows_.reserve(cohort.size());
  for (const auto& t : cohort.trajectories) {
    validate_trajectory(t, scenario_, horizon_);
    rows_.push_back(&t);
  }
}

Sample::Sample(std::span<const WeightedTrajectory> population, ScenarioKind kind)
    : scenario_(kind) {
  if (population.empty()) throw Error(ErrorCode::InvalidArgument, "empty population");
  horizon_ = population.front().trajectory.horizon();
  rows_.reserve(population.size());
  mass_.reserve(population.size());
  for (const auto& w : population) {
    validate_trajectory(w.trajectory, scenario_, horizon_);
    if (!(w.probability >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative mass");
    rows_.push_back(&w.trajectory);
    mass_.push_back(w.probability);
  }
}

StratumTable fit_strata(const Sample& sample) {
  const bool scenario_a = sample.scenario() == ScenarioKind::NoWithinPeriodTreatmentEffect;
  StratumTable table;
  table.scenario = sample.scenario();
  table.horizon = sample.horizon();

  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& traj = sample[i];
    const double m = sample.mass(i);
    const int c = traj.stratum;
    table.total_mass += m;
    table.stratum_mass[c] += m;

    for (int k = 1; k <= traj.horizon(); ++k) {
      if (k > 1 && traj.y[k - 2]) break;
      const bool died = traj.y[k - 1] != 0;
      const History before = traj.history(k - 1);
      const History through = traj.history(k);
      const bool treated = traj.x[k - 1] == Treatment::Given;

      auto& hz = table.hazard[{k, scenario_a ? before : through, c}];
      hz.total += m;
      if (died) hz.events += m;

      if (!died) {
        auto& sp = table.survivor_propensity[{k, before, c}];
        sp.total += m;
        if (treated) sp.events += m;
      }
      // In B the period-k treatment is observed even for patients dying in k.
      if (!scenario_a || !died) {
        auto& p = table.propensity[{k, before, c}];
        p.total += m;
        if (treated) p.events += m;
      }
    }
  }
  return table;
}

const char* weight_convention_name(WeightConvention c) {
  return c == WeightConvention::Lagged ? "lagged" : "current";
}

WeightConvention parse_weight_convention(std::string_view text) {
  if (text == "lagged") return WeightConvention::Lagged;
  if (text == "current") return WeightConvention::CurrentPeriod;
  throw Error(ErrorCode::InvalidArgument,
              "weight convention must be 'lagged' or 'current', got '" + std::string(text) + "'");
}

namespace {

void check_regimes(const Sample& sample, const Regime& treat, const Regime& control) {
  treat.validate(sample.horizon());
  control.validate(sample.horizon());
}

std::vector<double> survival_from(const std::vector<double>& hazard) {
  std::vector<double> s(hazard.size());
  double acc = 1.0;
  for (std::size_t k = 0; k < hazard.size(); ++k) {
    acc *= 1.0 - hazard[k];
    s[k] = acc;
  }
  return s;
}

struct NpmleArm {
  std::vector<double> survival;
  ArmDiagnostics diagnostics;
};

NpmleArm npmle_arm(const StratumTable& strata, const Regime& regime) {
  const int horizon = strata.horizon;
  NpmleArm arm;
  arm.survival.assign(horizon, 0.0);
  arm.diagnostics.regime = regime.to_string();
  arm.diagnostics.at_risk.assign(horizon, 0.0);

  const auto components = regime.components();
  for (const auto& r : components) {
    for (const auto& [c, mass] : strata.stratum_mass) {
      const double share = mass / strata.total_mass;
      double s = 1.0;
      for (int k = 1; k <= horizon; ++k) {
        const int bits = DgpTable::hazard_bits(strata.scenario, k);
        const History h = regime_history(r, bits);
        const auto count = strata.hazard_at(k, h, c);
        if (!count.defined()) empty_stratum("hazard", k, h, bits, c);
        s *= 1.0 - *count.proportion();
        arm.survival[k - 1] += share * s;
        arm.diagnostics.at_risk[k - 1] += count.total;
      }
    }
  }
  for (auto& v : arm.survival) v /= static_cast<double>(components.size());
  arm.diagnostics.weighted_at_risk = arm.diagnostics.at_risk;
  return arm;
}

struct CcwArm {
  std::vector<double> survival;
  ArmDiagnostics diagnostics;
};

// Shared walk over the clones of one arm. `emit` sees every clone-period.
template <class Emit>
CcwArm ccw_arm(const Sample& sample, const StratumTable& strata, const Regime& regime,
               WeightConvention convention, Emit&& emit) {
  if (regime.is_mixture())
    throw Error(ErrorCode::InvalidArgument, "CCW supports never, always and initiate:<i> only");
  const int horizon = sample.horizon();
  std::vector<double> events(horizon, 0.0), weighted(horizon, 0.0), raw(horizon, 0.0);
  WeightSummary summary{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double weight_mass = 0.0;

  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& traj = sample[i];
    const double m = sample.mass(i);
    double running = 1.0;  // W_{t-1}
    bool open = true;      // alive at the start of t and uncensored before t

    for (int t = 1; t <= horizon; ++t) {
      if (!open) {
        emit(CloneRow{i, {}, t, false, false, false, 0.0});
        continue;
      }
      const Treatment x = traj.x[t - 1];
      const bool died = traj.y[t - 1] != 0;
      const bool compatible =
          x == Treatment::Unclear || (x == Treatment::Given) == regime.treats_at(t);

      // Period-t factor 1 / P(x_t | Y_t = 0, x_{<t}, c), estimated among survivors.
      double factor = 1.0;
      if (x != Treatment::Unclear && compatible &&
          (convention == WeightConvention::CurrentPeriod || !died)) {
        const History before = traj.history(t - 1);
        const auto sp = strata.survivor_propensity_at(t, before, traj.stratum);
        const double p1 = sp.proportion().value_or(0.0);
        const double p = x == Treatment::Given ? p1 : 1.0 - p1;
        if (!sp.defined() || p <= 0.0) empty_stratum("propensity", t, before, t - 1, traj.stratum);
        factor = 1.0 / p;
      }

      double weight = 0.0;
      if (convention == WeightConvention::Lagged)
        weight = running;
      else if (compatible)
        weight = running * factor;
      if (weight > 0.0) {
        weighted[t - 1] += m * weight;
        raw[t - 1] += m;
        if (died) events[t - 1] += m * weight;
        summary.min = std::min(summary.min, weight);
        summary.max = std::max(summary.max, weight);
        summary.mean += m * weight;
        weight_mass += m;
      }
      emit(CloneRow{i, {}, t, true, died, !compatible, weight});

      if (died || !compatible)
        open = false;
      else
        running *= factor;
    }
  }

  std::vector<double> hazard(horizon);
  for (int t = 1; t <= horizon; ++t) {
    if (!(weighted[t - 1] > 0.0))
      throw Error(ErrorCode::NoAtRiskRows, "NoAtRiskRows(arm=" + regime.to_string() +
                                               ", period=" + std::to_string(t) + ")");
    hazard[t - 1] = events[t - 1] / weighted[t - 1];
  }
  summary.mean /= weight_mass;

  CcwArm arm;
  arm.survival = survival_from(hazard);
  arm.diagnostics = {regime.to_string(), std::move(raw), std::move(weighted), summary};
  return arm;
}

}  // namespace

AteEstimate npmle_ate(const Sample& sample, const Regime& treat, const Regime& control) {
  check_regimes(sample, treat, control);
  const auto strata = fit_strata(sample);
  auto t = npmle_arm(strata, treat);
  auto c = npmle_arm(strata, control);
  AteEstimate est;
  est.estimator = "npmle";
  est.ate = t.survival.back() - c.survival.back();
  est.survival_treat = std::move(t.survival);
  est.survival_control = std::move(c.survival);
  est.treat = std::move(t.diagnostics);
  est.control = std::move(c.diagnostics);
  return est;
}

AteEstimate ccw_ate(const Sample& sample, const Regime& treat, const Regime& control,
                    WeightConvention convention) {
  check_regimes(sample, treat, control);
  const auto strata = fit_strata(sample);
  auto ignore = [](const CloneRow&) {};
  auto t = ccw_arm(sample, strata, treat, convention, ignore);
  auto c = ccw_arm(sample, strata, control, convention, ignore);
  AteEstimate est;
  est.estimator = "ccw";
  est.ate = t.survival.back() - c.survival.back();
  est.survival_treat = std::move(t.survival);
  est.survival_control = std::move(c.survival);
  est.treat = std::move(t.diagnostics);
  est.control = std::move(c.diagnostics);
  return est;
}

std::vector<CloneRow> ccw_clone_rows(const Sample& sample, const Regime& treat,
                                     const Regime& control, WeightConvention convention) {
  check_regimes(sample, treat, control);
  const auto strata = fit_strata(sample);
  std::vector<CloneRow> rows;
  for (const auto* regime : {&treat, &control}) {
    const auto name = regime->to_string();
    ccw_arm(sample, strata, *regime, convention, [&](CloneRow r) {
      r.arm = name;
      rows.push_back(std::move(r));
    });
  }
  return rows;
}

double ccw_asymptotic(const DgpTable& dgp, const Regime& treat, const Regime& control,
                      WeightConvention convention) {
  const auto population = enumerate_distribution(dgp);
  return ccw_ate(Sample(population, dgp.kind()), treat, control, convention).ate;
}

}  // namespace tte
