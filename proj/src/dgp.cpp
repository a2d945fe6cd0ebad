#include "tte/dgp.hpp"

#include <cmath>

#include "tte/error.hpp"
#include "tte/parallel.hpp"
#include "tte/rng.hpp"

namespace tte {

char treatment_char(Treatment x) {
  switch (x) {
    case Treatment::None: return '0';
    case Treatment::Given: return '1';
    case Treatment::Unclear: return 'u';
  }
  return '?';
}

History regime_history(const Regime& regime, int upto) {
  History h = 0;
  for (int t = 1; t <= upto; ++t)
    if (regime.treats_at(t)) h |= bit_of(t);
  return h;
}

History Trajectory::history(int upto) const {
  History h = 0;
  for (int t = 1; t <= upto; ++t)
    if (x[t - 1] == Treatment::Given) h |= bit_of(t);
  return h;
}

int Trajectory::death_period() const {
  for (int t = 1; t <= horizon(); ++t)
    if (y[t - 1]) return t;
  return 0;
}

void validate_trajectory(const Trajectory& traj, ScenarioKind kind, int horizon) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, "trajectory: " + why); };
  if (traj.horizon() != horizon || static_cast<int>(traj.x.size()) != horizon)
    fail("expected " + std::to_string(horizon) + " periods");
  for (int t = 1; t <= horizon; ++t) {
    const bool dead_now = traj.y[t - 1] != 0;
    const bool dead_before = t > 1 && traj.y[t - 2] != 0;
    const bool unclear = traj.x[t - 1] == Treatment::Unclear;
    if (traj.y[t - 1] > 1) fail("vital status must be 0 or 1");
    if (dead_before && !dead_now) fail("death is absorbing (period " + std::to_string(t) + ")");
    const bool must_be_unclear =
        kind == ScenarioKind::NoWithinPeriodTreatmentEffect ? dead_now : dead_before;
    if (unclear != must_be_unclear)
      fail("treatment at period " + std::to_string(t) + (must_be_unclear ? " must be u" : " must be 0 or 1"));
  }
}

DgpTable::DgpTable(ScenarioKind kind, std::vector<std::vector<double>> hazard,
                   std::vector<std::vector<double>> propensity)
    : kind_(kind), hazard_(std::move(hazard)), propensity_(std::move(propensity)) {
  const auto horizon = static_cast<int>(hazard_.size());
  if (horizon < 1 || horizon > kMaxHorizon)
    throw Error(ErrorCode::InvalidHorizon,
                "DGP horizon must lie in 1.." + std::to_string(kMaxHorizon));
  if (static_cast<int>(propensity_.size()) != horizon)
    throw Error(ErrorCode::InvalidArgument, "hazard and propensity tables differ in length");
  auto check = [](const std::vector<double>& row, std::size_t width, const char* what, int k) {
    if (row.size() != width)
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " table for period " +
                                                  std::to_string(k) + " needs " +
                                                  std::to_string(width) + " entries");
    for (double p : row)
      if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " at period " +
                                                    std::to_string(k) + " is not a probability");
  };
  for (int k = 1; k <= horizon; ++k) {
    check(hazard_[k - 1], std::size_t{1} << hazard_bits(kind_, k), "hazard", k);
    check(propensity_[k - 1], std::size_t{1} << (k - 1), "propensity", k);
  }
}

DgpTable DgpTable::materialize(ScenarioKind kind, int horizon, const Formula& hazard,
                               const Formula& propensity) {
  if (horizon < 1 || horizon > kMaxHorizon)
    throw Error(ErrorCode::InvalidHorizon,
                "DGP horizon must lie in 1.." + std::to_string(kMaxHorizon));
  std::vector<std::vector<double>> h(horizon), p(horizon);
  for (int k = 1; k <= horizon; ++k) {
    const History hw = History{1} << hazard_bits(kind, k);
    for (History s = 0; s < hw; ++s) h[k - 1].push_back(hazard(k, s));
    const History pw = History{1} << (k - 1);
    for (History s = 0; s < pw; ++s) p[k - 1].push_back(propensity(k, s));
  }
  return DgpTable(kind, std::move(h), std::move(p));
}

DgpTable DgpTable::from_tables(ScenarioKind kind, std::vector<std::vector<double>> hazard,
                               std::vector<std::vector<double>> propensity) {
  return DgpTable(kind, std::move(hazard), std::move(propensity));
}

DgpTable default_dgp(ScenarioKind kind) {
  auto x = [](History h, int t) { return (h & bit_of(t)) ? 1.0 : 0.0; };
  // Same treatment process in both scenarios; it depends on the last treatment only.
  auto propensity = [x](int k, History h) { return k == 1 ? 0.3 : 0.2 + 0.7 * x(h, k - 1); };

  if (kind == ScenarioKind::NoWithinPeriodTreatmentEffect) {
    auto hazard = [x](int k, History h) {
      switch (k) {
        case 1: return 0.05;
        case 2: return 0.2 - 0.1 * x(h, 1);
        default: return 0.3 - 0.1 * x(h, 1) - 0.1 * x(h, 2);
      }
    };
    return DgpTable::materialize(kind, 3, hazard, propensity);
  }
  auto hazard = [x](int k, History h) {
    switch (k) {
      case 1: return 0.2 - 0.1 * x(h, 1);
      case 2: return 0.2 - 0.05 * x(h, 1) - 0.025 * x(h, 2);
      default: return 0.3 - 0.1 * x(h, 1) - 0.05 * x(h, 2) - 0.025 * x(h, 3);
    }
  };
  return DgpTable::materialize(kind, 3, hazard, propensity);
}

namespace {

Trajectory draw_patient(const DgpTable& dgp, std::uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);
  const int horizon = dgp.horizon();
  const bool scenario_a = dgp.kind() == ScenarioKind::NoWithinPeriodTreatmentEffect;
  Trajectory traj;
  traj.x.assign(horizon, Treatment::Unclear);
  traj.y.assign(horizon, 1);

  History h = 0;
  for (int k = 1; k <= horizon; ++k) {
    if (scenario_a) {
      if (uniform01(rng) < dgp.hazard(k, h)) break;
      traj.y[k - 1] = 0;
      const bool treated = uniform01(rng) < dgp.propensity(k, h);
      traj.x[k - 1] = treated ? Treatment::Given : Treatment::None;
      if (treated) h |= bit_of(k);
    } else {
      const bool treated = uniform01(rng) < dgp.propensity(k, h);
      traj.x[k - 1] = treated ? Treatment::Given : Treatment::None;
      if (treated) h |= bit_of(k);
      if (uniform01(rng) < dgp.hazard(k, h)) break;
      traj.y[k - 1] = 0;
    }
  }
  return traj;
}

struct Enumerator {
  const DgpTable& dgp;
  bool scenario_a;
  std::vector<WeightedTrajectory> out;
  Trajectory current;

  void emit_death(int k, double p) {
    auto traj = current;
    for (int t = k; t <= dgp.horizon(); ++t) {
      traj.y[t - 1] = 1;
      if (t > k || scenario_a) traj.x[t - 1] = Treatment::Unclear;
    }
    out.push_back({std::move(traj), p});
  }

  void walk(int k, History h, double p) {
    if (p == 0.0) return;
    if (k > dgp.horizon()) {
      out.push_back({current, p});
      return;
    }
    if (scenario_a) {
      const double die = dgp.hazard(k, h);
      if (die > 0.0) emit_death(k, p * die);
      current.y[k - 1] = 0;
      branch_treatment(k, h, p * (1.0 - die), [this](int next, History hh, double pp) {
        walk(next + 1, hh, pp);
      });
    } else {
      branch_treatment(k, h, p, [this](int kk, History hh, double pp) {
        const double die = dgp.hazard(kk, hh);
        if (die > 0.0 && pp > 0.0) emit_death(kk, pp * die);
        current.y[kk - 1] = 0;
        walk(kk + 1, hh, pp * (1.0 - die));
      });
    }
  }

  template <class Next>
  void branch_treatment(int k, History h, double p, Next next) {
    if (p == 0.0) return;
    const double treat = dgp.propensity(k, h);
    if (treat > 0.0) {
      current.x[k - 1] = Treatment::Given;
      next(k, h | bit_of(k), p * treat);
    }
    if (treat < 1.0) {
      current.x[k - 1] = Treatment::None;
      next(k, h, p * (1.0 - treat));
    }
  }
};

}  // namespace

Cohort sample_cohort(const DgpTable& dgp, std::size_t n, std::uint64_t seed, unsigned workers) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cohort size must be >= 1");
  Cohort cohort{dgp.kind(), seed, std::vector<Trajectory>(n)};
  parallel_for(n, workers, [&](std::size_t i) {
    cohort.trajectories[i] = draw_patient(dgp, substream_seed(seed, i));
  });
  return cohort;
}

std::vector<WeightedTrajectory> enumerate_distribution(const DgpTable& dgp) {
  constexpr double kMaxSupport = 1e6;
  const int horizon = dgp.horizon();
  // Survivors: 2^T histories. Deaths at k: 2^(k-1) histories in A, 2^k in B.
  const double bound = std::ldexp(1.0, horizon) +
                       (dgp.kind() == ScenarioKind::NoWithinPeriodTreatmentEffect
                            ? std::ldexp(1.0, horizon) - 1.0
                            : std::ldexp(1.0, horizon + 1) - 2.0);
  if (bound > kMaxSupport)
    throw Error(ErrorCode::SupportTooLarge,
                "support of up to " + std::to_string(static_cast<long long>(bound)) +
                    " trajectories exceeds 10^6");

  Enumerator e{dgp, dgp.kind() == ScenarioKind::NoWithinPeriodTreatmentEffect, {}, {}};
  e.current.x.assign(horizon, Treatment::Unclear);
  e.current.y.assign(horizon, 0);
  e.walk(1, 0, 1.0);
  return std::move(e.out);
}

std::vector<double> counterfactual_survival(const DgpTable& dgp, const Regime& regime) {
  const int horizon = dgp.horizon();
  regime.validate(horizon);
  const auto components = regime.components();
  std::vector<double> curve(horizon, 0.0);
  for (const auto& r : components) {
    double s = 1.0;
    for (int k = 1; k <= horizon; ++k) {
      s *= 1.0 - dgp.hazard(k, regime_history(r, DgpTable::hazard_bits(dgp.kind(), k)));
      curve[k - 1] += s;
    }
  }
  for (auto& v : curve) v /= static_cast<double>(components.size());
  return curve;
}

double true_ate(const DgpTable& dgp, const Regime& treat, const Regime& control) {
  return counterfactual_survival(dgp, treat).back() - counterfactual_survival(dgp, control).back();
}

}  // namespace tte
