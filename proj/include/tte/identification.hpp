#pragma once

#include <vector>

#include "tte/graph.hpp"
#include "tte/scenarios.hpp"

namespace tte {

struct PremiseResult {
  int period = 0;
  bool rule2 = false;
  bool rule3 = false;
};

struct PremiseReport {
  ScenarioKind scenario = ScenarioKind::NoWithinPeriodTreatmentEffect;
  int horizon = 0;
  std::vector<PremiseResult> periods;
  bool identified = false;
};

// The split point between "already intervened" and "later" treatments at
// period k differs by scenario: A intervenes on X_{t<k}, B on X_{t<=k},
// because in B the period-k treatment already acts on Y_k.

/// Premise for dropping the interventions on later treatments from the
/// period-k hazard: Y_k separated from the later treatments given the earlier
/// treatments, earlier outcomes and C, after removing edges into the earlier
/// treatments and into those later treatments that are not ancestors of C.
bool rule3_premise_holds(const Admg& g, ScenarioKind kind, int horizon, int k);

/// Premise for exchanging do(X) with conditioning on the earlier treatments:
/// Y_k separated from them given earlier outcomes and C, after removing the
/// edges out of those treatments.
bool rule2_premise_holds(const Admg& g, ScenarioKind kind, int horizon, int k);

/// Evaluates both premises for k = 1..T on the full scenario graph.
PremiseReport identification_report(ScenarioKind kind, int horizon);

}  // namespace tte
