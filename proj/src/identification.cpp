#include "tte/identification.hpp"

#include <algorithm>

#include "tte/error.hpp"

namespace tte {

namespace {

struct Split {
  NodeSet earlier;  // treatments already intervened on at period k
  NodeSet later;
};

Split split_treatments(ScenarioKind kind, int horizon, int k) {
  if (horizon < 1) throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1");
  if (k < 1 || k > horizon)
    throw Error(ErrorCode::PeriodOutOfRange, "k must lie in 1.." + std::to_string(horizon));
  const int last_earlier = kind == ScenarioKind::NoWithinPeriodTreatmentEffect ? k - 1 : k;
  Split s;
  for (int t = 1; t <= horizon; ++t)
    (t <= last_earlier ? s.earlier : s.later).insert(NodeLabel::treatment(t));
  return s;
}

NodeSet confounder_if_present(const Admg& g) {
  if (g.contains(NodeLabel::confounder())) return {NodeLabel::confounder()};
  return {};
}

}  // namespace

bool rule3_premise_holds(const Admg& g, ScenarioKind kind, int horizon, int k) {
  const auto [earlier, later] = split_treatments(kind, horizon, k);
  if (later.empty()) return true;

  const auto c = confounder_if_present(g);
  NodeSet given = earlier;
  for (int t = 1; t < k; ++t) given.insert(NodeLabel::outcome(t));
  given.insert(c.begin(), c.end());

  // Later treatments that are not ancestors of C in the
  // graph with edges into the earlier treatments removed.
  const auto without_earlier = mutilate(g, earlier, {});
  const auto anc = c.empty() ? NodeSet{} : ancestors(without_earlier, c);
  NodeSet cut = earlier;
  for (const auto& x : later)
    if (!anc.contains(x)) cut.insert(x);

  return m_separated(mutilate(g, cut, {}), {NodeLabel::outcome(k)}, later, given);
}

bool rule2_premise_holds(const Admg& g, ScenarioKind kind, int horizon, int k) {
  const auto [earlier, later] = split_treatments(kind, horizon, k);
  if (earlier.empty()) return true;

  NodeSet given = confounder_if_present(g);
  for (int t = 1; t < k; ++t) given.insert(NodeLabel::outcome(t));
  return m_separated(mutilate(g, {}, earlier), {NodeLabel::outcome(k)}, earlier, given);
}

PremiseReport identification_report(ScenarioKind kind, int horizon) {
  const auto g = build_trial_graph(kind, horizon, true);
  PremiseReport report{kind, horizon, {}, true};
  for (int k = 1; k <= horizon; ++k) {
    PremiseResult r{k, rule2_premise_holds(g, kind, horizon, k),
                    rule3_premise_holds(g, kind, horizon, k)};
    report.identified = report.identified && r.rule2 && r.rule3;
    report.periods.push_back(r);
  }
  return report;
}

}  // namespace tte
