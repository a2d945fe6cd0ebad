#include "tte/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <thread>

#include "tte/error.hpp"
#include "tte/parallel.hpp"
#include "tte/rng.hpp"

namespace tte {

const char* estimator_name(EstimatorKind e) { return e == EstimatorKind::Npmle ? "npmle" : "ccw"; }

EstimatorKind parse_estimator(std::string_view text) {
  if (text == "npmle") return EstimatorKind::Npmle;
  if (text == "ccw") return EstimatorKind::Ccw;
  throw Error(ErrorCode::InvalidArgument, "estimator must be npmle or ccw, got '" + std::string(text) + "'");
}

void StudyConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); };
  if (n_replicates < 1) fail("n_replicates must be >= 1");
  if (n_patients < 1) fail("n_patients must be >= 1");
  if (bootstrap_iterations < 1) fail("bootstrap_iterations must be >= 1");
  if (estimators.empty()) fail("at least one estimator is required");
  if (dgp && dgp->kind() != scenario) fail("DGP scenario does not match the study scenario");
  const int horizon = dgp ? dgp->horizon() : 3;
  treat.validate(horizon);
  control.validate(horizon);
  for (auto e : estimators)
    if (e == EstimatorKind::Ccw && (treat.is_mixture() || control.is_mixture()))
      fail("ccw does not support grace regimes");
}

DgpTable StudyConfig::resolved_dgp() const { return dgp ? *dgp : default_dgp(scenario); }

const EstimatorSummary& BiasReport::summary(EstimatorKind e) const {
  for (const auto& s : estimators)
    if (s.estimator == e) return s;
  throw Error(ErrorCode::InvalidArgument, std::string("estimator not in report: ") + estimator_name(e));
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate) {
  return substream_seed(master_seed, replicate);
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> bootstrap_mean_ci(std::span<const double> errors, std::size_t iterations,
                                            std::uint64_t seed, double level) {
  if (errors.empty()) throw Error(ErrorCode::InvalidArgument, "bootstrap of empty data");
  std::mt19937_64 rng(seed);
  const auto n = errors.size();
  std::vector<double> means(iterations);
  for (auto& mean : means) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += errors[uniform_below(rng, n)];
    mean = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {percentile(means, tail), percentile(means, 1.0 - tail)};
}

BiasReport run_bias_study(const StudyConfig& config, unsigned workers) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto dgp = config.resolved_dgp();
  const auto n_est = config.estimators.size();

  BiasReport report;
  report.config = config;
  report.true_ate = true_ate(dgp, config.treat, config.control);
  report.estimators.resize(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    report.estimators[e].estimator = config.estimators[e];
    report.estimators[e].estimates.resize(config.n_replicates);
  }

  parallel_for(config.n_replicates, workers, [&](std::size_t r) {
    const auto cohort = sample_cohort(dgp, config.n_patients, replicate_seed(config.master_seed, r));
    const Sample sample(cohort);
    for (std::size_t e = 0; e < n_est; ++e) {
      try {
        const auto est = config.estimators[e] == EstimatorKind::Npmle
                             ? npmle_ate(sample, config.treat, config.control)
                             : ccw_ate(sample, config.treat, config.control, config.weight_convention);
        report.estimators[e].estimates[r] = est.ate;
      } catch (const Error& err) {
        if (!is_estimation_failure(err.code())) throw;
      }
    }
  });

  const auto bootstrap_root = substream_seed(config.master_seed, hash_name("bootstrap"));
  for (std::size_t e = 0; e < n_est; ++e) {
    auto& s = report.estimators[e];
    std::vector<double> errors;
    for (const auto& v : s.estimates)
      if (v) errors.push_back(*v - report.true_ate);
    s.failures = config.n_replicates - errors.size();
    if (errors.empty())
      throw Error(ErrorCode::AllReplicatesFailed,
                  std::string("every replicate failed for ") + estimator_name(s.estimator));
    s.mean_bias = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
    const auto seed = substream_seed(bootstrap_root, static_cast<std::uint64_t>(s.estimator));
    std::tie(s.ci_lower, s.ci_upper) = bootstrap_mean_ci(errors, config.bootstrap_iterations, seed);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

unsigned workers_from_env() {
  if (const char* env = std::getenv("TTE_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

long long parameter_count(long long control_periods, long long subgroups, long long treat_periods,
                          long long c_levels) {
  if (control_periods < 1 || subgroups < 1 || treat_periods < 1 || c_levels < 1)
    throw Error(ErrorCode::InvalidArgument, "parameter_count arguments must be >= 1");
  return c_levels * (control_periods + subgroups * treat_periods) - 1;
}

}  // namespace tte
