#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tte/graph.hpp"

namespace tte {

/// Which within-period arrow between treatment and outcome is absent.
///  - A (NoWithinPeriodTreatmentEffect): Y_t -> X_t, no X_t -> Y_t.
///  - B (NoWithinPeriodOutcomeEffect):   X_t -> Y_t, no Y_t -> X_t.
enum class ScenarioKind { NoWithinPeriodTreatmentEffect, NoWithinPeriodOutcomeEffect };

std::string_view scenario_name(ScenarioKind kind);  // "A" / "B"
ScenarioKind parse_scenario(std::string_view name);  // accepts "A"/"B" (any case)

/// Treatment strategy of one trial arm.
class Regime {
 public:
  enum class Strategy { Never, AlwaysFromStart, InitiateAt, UniformGrace };

  static Regime never() { return Regime(Strategy::Never, 0); }
  static Regime always_from_start() { return Regime(Strategy::AlwaysFromStart, 0); }
  static Regime initiate_at(int period) { return Regime(Strategy::InitiateAt, period); }
  static Regime uniform_grace(int periods) { return Regime(Strategy::UniformGrace, periods); }

  Strategy strategy() const { return strategy_; }
  /// Initiation period (InitiateAt) or grace length (UniformGrace); 0 otherwise.
  int parameter() const { return parameter_; }

  bool is_mixture() const { return strategy_ == Strategy::UniformGrace; }

  /// Prescribed treatment at period t while alive. Not defined for mixtures.
  bool treats_at(int t) const;

  /// Deterministic components with equal mixing weight: InitiateAt(1..g) for
  /// UniformGrace(g), the regime itself otherwise.
  std::vector<Regime> components() const;

  /// Throws Error(RegimeOutOfRange) unless the parameter lies in [1, horizon].
  void validate(int horizon) const;

  /// "never", "always", "initiate:<i>", "grace:<g>".
  std::string to_string() const;
  static Regime parse(std::string_view text);

  bool operator==(const Regime&) const = default;

 private:
  Regime(Strategy s, int p) : strategy_(s), parameter_(p) {}

  Strategy strategy_;
  int parameter_;
};

/// Scenario graph over T periods. `with_latents` adds C, A, B and the full
/// treatment history X_s -> X_t (s < t); without them only X_s -> X_{s+1}.
Admg build_trial_graph(ScenarioKind kind, int horizon, bool with_latents);

/// Ancestral multi-world network on the simplified graph: factual nodes plus
/// a counterfactual copy of every Y_t downstream of a treatment, linked to
/// its factual twin by a bidirected edge.
Admg build_amwn(ScenarioKind kind, int horizon, const Regime& regime);

/// Counterfactual exchangeability of Y_i under `regime` with X_k given the
/// treatment history before k and outcomes through k. A factual stand-in that
/// lies in the conditioning set counts as exchangeable.
bool exchangeability_holds(ScenarioKind kind, int horizon, int i, int k, const Regime& regime);

/// table[i-1][k-1] == exchangeability_holds(kind, horizon, i, k, regime).
std::vector<std::vector<bool>> exchangeability_table(ScenarioKind kind, int horizon,
                                                     const Regime& regime);

}  // namespace tte
