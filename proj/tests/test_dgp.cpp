#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "tte/dgp.hpp"
#include "tte/error.hpp"

using namespace tte;

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

std::string key(const Trajectory& t) {
  std::string s;
  for (int i = 0; i < t.horizon(); ++i) {
    s += treatment_char(t.x[i]);
    s += static_cast<char>('0' + t.y[i]);
  }
  return s;
}

Trajectory traj(std::string x, std::string y) {
  Trajectory t;
  for (char c : x) t.x.push_back(c == 'u' ? Treatment::Unclear : c == '1' ? Treatment::Given : Treatment::None);
  for (char c : y) t.y.push_back(static_cast<std::uint8_t>(c - '0'));
  return t;
}

DgpTable random_dgp(std::mt19937_64& rng, ScenarioKind kind, int horizon) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> hazard, propensity;
  for (int k = 1; k <= horizon; ++k) {
    hazard.emplace_back(std::size_t{1} << DgpTable::hazard_bits(kind, k));
    propensity.emplace_back(std::size_t{1} << (k - 1));
    for (auto& p : hazard.back()) p = 0.02 + 0.4 * u(rng);
    for (auto& p : propensity.back()) p = 0.05 + 0.9 * u(rng);
  }
  return DgpTable::from_tables(kind, hazard, propensity);
}

// The DGP with the propensities replaced by the regime's prescriptions.
DgpTable intervened(const DgpTable& dgp, const Regime& r) {
  auto hazard = [&](int k, History h) { return dgp.hazard(k, h); };
  auto propensity = [&](int k, History) { return r.treats_at(k) ? 1.0 : 0.0; };
  return DgpTable::materialize(dgp.kind(), dgp.horizon(), hazard, propensity);
}

double alive_at(const std::vector<WeightedTrajectory>& dist, int k) {
  double s = 0.0;
  for (const auto& w : dist)
    if (w.trajectory.y[k - 1] == 0) s += w.probability;
  return s;
}

}  // namespace

TEST_CASE("default tables") {
  const auto a = default_dgp(kA);
  CHECK(a.horizon() == 3);
  CHECK(a.hazard(1, 0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(a.hazard(2, bit_of(1)) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.hazard(3, bit_of(1) | bit_of(2)) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.propensity(1, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(a.propensity(2, bit_of(1)) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(a.propensity(3, bit_of(1)) == doctest::Approx(0.2).epsilon(1e-15));

  const auto b = default_dgp(kB);
  CHECK(b.hazard(1, bit_of(1)) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(b.hazard(3, bit_of(1) | bit_of(2) | bit_of(3)) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(b.hazard(2, bit_of(2)) == doctest::Approx(0.175).epsilon(1e-15));
  CHECK(b.propensity(3, bit_of(2)) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("table validation") {
  auto half = [](int, History) { return 0.5; };
  CHECK(code_of([&] { DgpTable::materialize(kA, 2, [](int, History) { return 1.5; }, half); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { DgpTable::materialize(kA, 2, half, [](int, History) { return -0.1; }); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { DgpTable::materialize(kA, 0, half, half); }) == ErrorCode::InvalidHorizon);
  CHECK(code_of([&] { DgpTable::from_tables(kB, {{0.1}}, {{0.5}}); }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(DgpTable::from_tables(kB, {{0.1, 0.2}}, {{0.5}}));
}

TEST_CASE("trajectory encoding rules") {
  CHECK_NOTHROW(validate_trajectory(traj("01u", "001"), kA, 3));
  CHECK_NOTHROW(validate_trajectory(traj("uuu", "111"), kA, 3));
  CHECK_THROWS(validate_trajectory(traj("011", "001"), kA, 3));   // treatment on the death period
  CHECK_THROWS(validate_trajectory(traj("0uu", "010"), kA, 3));   // resurrection
  CHECK_THROWS(validate_trajectory(traj("01", "00"), kA, 3));     // wrong length

  CHECK_NOTHROW(validate_trajectory(traj("011", "001"), kB, 3));
  CHECK_NOTHROW(validate_trajectory(traj("10u", "011"), kB, 3));
  CHECK_THROWS(validate_trajectory(traj("u00", "000"), kB, 3));   // X1 always observed
  CHECK_THROWS(validate_trajectory(traj("1uu", "011"), kB, 3));   // X2 observed when Y1 = 0

  const auto t = traj("10u", "011");
  CHECK(t.history(3) == bit_of(1));
  CHECK(t.death_period() == 2);
  CHECK(traj("000", "000").death_period() == 0);
}

TEST_CASE("regime histories") {
  CHECK(regime_history(Regime::never(), 3) == 0);
  CHECK(regime_history(Regime::always_from_start(), 3) == 0b111);
  CHECK(regime_history(Regime::initiate_at(2), 3) == 0b110);
  CHECK(regime_history(Regime::initiate_at(3), 2) == 0);
}

TEST_CASE("small supports") {
  const auto b1 = DgpTable::from_tables(kB, {{0.2, 0.1}}, {{0.3}});
  const auto support_b = enumerate_distribution(b1);
  CHECK(support_b.size() == 4);
  std::map<std::string, double> pb;
  for (const auto& w : support_b) pb[key(w.trajectory)] = w.probability;
  CHECK(pb.at("10") == doctest::Approx(0.27).epsilon(1e-14));
  CHECK(pb.at("11") == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(pb.at("01") == doctest::Approx(0.14).epsilon(1e-14));

  const auto a1 = DgpTable::from_tables(kA, {{0.05}}, {{0.3}});
  std::map<std::string, double> pa;
  for (const auto& w : enumerate_distribution(a1)) pa[key(w.trajectory)] = w.probability;
  CHECK(pa.size() == 3);
  CHECK(pa.at("u1") == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(pa.at("10") == doctest::Approx(0.285).epsilon(1e-14));
  CHECK(pa.at("00") == doctest::Approx(0.665).epsilon(1e-14));
}

TEST_CASE("enumeration is a distribution over valid trajectories") {
  std::mt19937_64 rng(0xd6'0001);
  for (int trial = 0; trial < 40; ++trial)
    for (auto kind : {kA, kB}) {
      const int horizon = 1 + trial % 6;
      const auto dgp = trial < 2 ? default_dgp(kind) : random_dgp(rng, kind, horizon);
      const auto dist = enumerate_distribution(dgp);
      double total = 0.0;
      std::map<std::string, int> seen;
      for (const auto& w : dist) {
        CHECK(w.probability > 0.0);
        CHECK_NOTHROW(validate_trajectory(w.trajectory, kind, dgp.horizon()));
        total += w.probability;
        ++seen[key(w.trajectory)];
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
      CHECK(seen.size() == dist.size());
      // Survivors of all T periods carry 2^T histories; a death at t carries
      // 2^(t-1) histories in A and 2^t in B.
      const int T = dgp.horizon();
      std::size_t expected = std::size_t{1} << T;
      for (int t = 1; t <= T; ++t) expected += std::size_t{1} << (kind == kA ? t - 1 : t);
      CHECK(dist.size() == expected);
    }
}

TEST_CASE("support size guard") {
  const auto big = DgpTable::materialize(kB, 20, [](int, History) { return 0.1; }, [](int, History) { return 0.5; });
  CHECK(code_of([&] { enumerate_distribution(big); }) == ErrorCode::SupportTooLarge);
}

TEST_CASE("counterfactual survival matches hand-computed products") {
  const auto a = default_dgp(kA), b = default_dgp(kB);
  auto close = [](const std::vector<double>& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-15);
  };
  close(counterfactual_survival(a, Regime::never()), {0.95, 0.95 * 0.8, 0.95 * 0.8 * 0.7});
  close(counterfactual_survival(a, Regime::always_from_start()), {0.95, 0.95 * 0.9, 0.95 * 0.9 * 0.9});
  close(counterfactual_survival(b, Regime::never()), {0.8, 0.8 * 0.8, 0.8 * 0.8 * 0.7});
  close(counterfactual_survival(b, Regime::always_from_start()), {0.9, 0.9 * 0.875, 0.9 * 0.875 * 0.875});
  close(counterfactual_survival(a, Regime::initiate_at(2)), {0.95, 0.95 * 0.8, 0.95 * 0.8 * 0.8});
  close(counterfactual_survival(b, Regime::initiate_at(3)), {0.8, 0.8 * 0.8, 0.8 * 0.8 * 0.725});

  CHECK(std::abs(true_ate(a, Regime::always_from_start(), Regime::never()) - 0.2375) < 1e-15);
  CHECK(std::abs(true_ate(b, Regime::always_from_start(), Regime::never()) - 0.2410625) < 1e-15);
  CHECK(code_of([&] { counterfactual_survival(a, Regime::initiate_at(4)); }) == ErrorCode::RegimeOutOfRange);
}

TEST_CASE("counterfactual survival equals survival in the intervened process") {
  std::mt19937_64 rng(0xd6'0002);
  for (int trial = 0; trial < 30; ++trial)
    for (auto kind : {kA, kB}) {
      const int horizon = 1 + trial % 5;
      const auto dgp = trial == 0 ? default_dgp(kind) : random_dgp(rng, kind, horizon);
      const int T = dgp.horizon();
      std::vector<Regime> regimes{Regime::never(), Regime::always_from_start()};
      for (int i = 1; i <= T; ++i) regimes.push_back(Regime::initiate_at(i));
      for (const auto& r : regimes) {
        const auto curve = counterfactual_survival(dgp, r);
        const auto dist = enumerate_distribution(intervened(dgp, r));
        for (int k = 1; k <= T; ++k) CHECK(std::abs(curve[k - 1] - alive_at(dist, k)) < 1e-12);
      }
      for (int g = 1; g <= T; ++g) {
        const auto curve = counterfactual_survival(dgp, Regime::uniform_grace(g));
        for (int k = 1; k <= T; ++k) {
          double avg = 0.0;
          for (int i = 1; i <= g; ++i) avg += alive_at(enumerate_distribution(intervened(dgp, Regime::initiate_at(i))), k);
          CHECK(std::abs(curve[k - 1] - avg / g) < 1e-12);
        }
        for (int k = 1; k < T; ++k) CHECK(curve[k] <= curve[k - 1]);
        CHECK(curve.front() <= 1.0);
        CHECK(curve.back() >= 0.0);
      }
      const auto one = counterfactual_survival(dgp, Regime::uniform_grace(1));
      CHECK(one == counterfactual_survival(dgp, Regime::initiate_at(1)));
      CHECK(one == counterfactual_survival(dgp, Regime::always_from_start()));
    }
}

TEST_CASE("null effect") {
  for (auto kind : {kA, kB}) {
    const auto flat = DgpTable::materialize(kind, 4, [](int k, History) { return 0.05 * k; },
                                            [](int, History h) { return h ? 0.8 : 0.3; });
    CHECK(true_ate(flat, Regime::always_from_start(), Regime::never()) == 0.0);
  }
}

TEST_CASE("sampling is deterministic and independent of worker count") {
  for (auto kind : {kA, kB}) {
    const auto dgp = default_dgp(kind);
    const auto one = sample_cohort(dgp, 5000, 42, 1);
    CHECK(one.size() == 5000);
    CHECK(one.seed == 42);
    CHECK(one.scenario == kind);
    for (unsigned w : {2u, 3u, 8u}) CHECK(sample_cohort(dgp, 5000, 42, w).trajectories == one.trajectories);
    CHECK(sample_cohort(dgp, 5000, 43).trajectories != one.trajectories);
    // Patient i depends only on its own substream.
    const auto prefix = sample_cohort(dgp, 100, 42);
    CHECK(std::equal(prefix.trajectories.begin(), prefix.trajectories.end(), one.trajectories.begin()));
    for (const auto& t : one.trajectories) validate_trajectory(t, kind, 3);
  }
  CHECK(code_of([] { sample_cohort(default_dgp(kA), 0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("marginal frequencies") {
  const std::size_t n = 200000;
  const auto a = sample_cohort(default_dgp(kA), n, 7, 4);
  const auto b = sample_cohort(default_dgp(kB), n, 7, 4);
  double dead1 = 0, treated1 = 0;
  for (const auto& t : a.trajectories) dead1 += t.y[0];
  for (const auto& t : b.trajectories) treated1 += t.x[0] == Treatment::Given;
  auto within = [&](double count, double p) {
    return std::abs(count / n - p) <= 4.0 * std::sqrt(p * (1 - p) / n);
  };
  CHECK(within(dead1, 0.05));
  CHECK(within(treated1, 0.3));
}

TEST_CASE("sampled frequencies match the enumerated distribution") {
  const std::size_t n = 300000;
  for (auto kind : {kA, kB}) {
    const auto dgp = default_dgp(kind);
    const auto cohort = sample_cohort(dgp, n, 2024, 4);
    std::map<std::string, double> counts;
    for (const auto& t : cohort.trajectories) ++counts[key(t)];
    double covered = 0.0;
    for (const auto& w : enumerate_distribution(dgp)) {
      covered += counts[key(w.trajectory)];
      if (w.probability < 0.001) continue;
      const double se = std::sqrt(w.probability * (1 - w.probability) / n);
      CHECK(std::abs(counts[key(w.trajectory)] / n - w.probability) <= 5 * se);
    }
    CHECK(covered == n);  // nothing sampled outside the support
  }
}
