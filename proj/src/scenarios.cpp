#include "tte/scenarios.hpp"

#include <charconv>

#include "tte/error.hpp"

namespace tte {

std::string_view scenario_name(ScenarioKind kind) {
  return kind == ScenarioKind::NoWithinPeriodTreatmentEffect ? "A" : "B";
}

ScenarioKind parse_scenario(std::string_view name) {
  if (name == "A" || name == "a") return ScenarioKind::NoWithinPeriodTreatmentEffect;
  if (name == "B" || name == "b") return ScenarioKind::NoWithinPeriodOutcomeEffect;
  throw Error(ErrorCode::InvalidArgument, "scenario must be A or B, got '" + std::string(name) + "'");
}

bool Regime::treats_at(int t) const {
  switch (strategy_) {
    case Strategy::Never: return false;
    case Strategy::AlwaysFromStart: return true;
    case Strategy::InitiateAt: return t >= parameter_;
    case Strategy::UniformGrace: break;
  }
  throw Error(ErrorCode::InvalidArgument, "grace regime has no single prescription");
}

std::vector<Regime> Regime::components() const {
  if (strategy_ != Strategy::UniformGrace) return {*this};
  std::vector<Regime> out;
  for (int i = 1; i <= parameter_; ++i) out.push_back(initiate_at(i));
  return out;
}

void Regime::validate(int horizon) const {
  if (strategy_ == Strategy::Never || strategy_ == Strategy::AlwaysFromStart) return;
  if (parameter_ < 1 || parameter_ > horizon)
    throw Error(ErrorCode::RegimeOutOfRange,
                "regime " + to_string() + " outside 1.." + std::to_string(horizon));
}

std::string Regime::to_string() const {
  switch (strategy_) {
    case Strategy::Never: return "never";
    case Strategy::AlwaysFromStart: return "always";
    case Strategy::InitiateAt: return "initiate:" + std::to_string(parameter_);
    case Strategy::UniformGrace: return "grace:" + std::to_string(parameter_);
  }
  return "?";
}

Regime Regime::parse(std::string_view text) {
  if (text == "never") return never();
  if (text == "always") return always_from_start();
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const auto head = text.substr(0, colon);
    const auto tail = text.substr(colon + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
    if (!tail.empty() && ec == std::errc{} && ptr == tail.data() + tail.size()) {
      if (head == "initiate") return initiate_at(value);
      if (head == "grace") return uniform_grace(value);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "bad regime '" + std::string(text) +
                                              "' (never|always|initiate:<i>|grace:<g>)");
}

namespace {

void require_horizon(int horizon) {
  if (horizon < 1) throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1");
}

}  // namespace

Admg build_trial_graph(ScenarioKind kind, int horizon, bool with_latents) {
  require_horizon(horizon);
  using L = NodeLabel;
  std::vector<L> nodes;
  std::vector<Edge> edges;
  for (int t = 1; t <= horizon; ++t) {
    nodes.push_back(L::treatment(t));
    nodes.push_back(L::outcome(t));
  }

  for (int t = 1; t <= horizon; ++t) {
    const auto x = L::treatment(t);
    const auto y = L::outcome(t);
    if (t > 1) {
      edges.push_back({L::outcome(t - 1), y});
      edges.push_back({L::outcome(t - 1), x});
    }
    for (int s = 1; s < t; ++s) {
      edges.push_back({L::treatment(s), y});
      if (with_latents || s == t - 1) edges.push_back({L::treatment(s), x});
    }
    if (kind == ScenarioKind::NoWithinPeriodTreatmentEffect)
      edges.push_back({y, x});
    else
      edges.push_back({x, y});
  }

  if (with_latents) {
    const auto c = L::confounder();
    const auto a = L::latent_treatment_cause();
    const auto b = L::latent_outcome_cause();
    nodes.insert(nodes.end(), {c, a, b});
    for (int t = 1; t <= horizon; ++t) {
      edges.push_back({a, L::treatment(t)});
      edges.push_back({b, L::outcome(t)});
      edges.push_back({c, L::treatment(t)});
      edges.push_back({c, L::outcome(t)});
    }
  }
  return Admg::build(std::move(nodes), std::move(edges));
}

Admg build_amwn(ScenarioKind kind, int horizon, const Regime& regime) {
  regime.validate(horizon);
  const auto base = build_trial_graph(kind, horizon, false);

  // Every regime fixes every X_t while alive, so the intervened set is all X.
  NodeSet treatments;
  for (int t = 1; t <= horizon; ++t) treatments.insert(NodeLabel::treatment(t));
  const auto affected = descendants(base, treatments);

  std::vector<NodeLabel> nodes = base.nodes();
  std::vector<Edge> directed = base.directed_edges();
  std::vector<Edge> bidirected;
  for (int t = 1; t <= horizon; ++t) {
    const auto y = NodeLabel::outcome(t);
    if (!affected.contains(y)) continue;
    const auto copy = NodeLabel::counterfactual(t);
    nodes.push_back(copy);
    bidirected.push_back({y, copy});
    if (t > 1) {
      const auto prev_copy = NodeLabel::counterfactual(t - 1);
      const bool prev_copied = affected.contains(NodeLabel::outcome(t - 1));
      directed.push_back({prev_copied ? prev_copy : NodeLabel::outcome(t - 1), copy});
    }
  }
  return Admg::build(std::move(nodes), std::move(directed), std::move(bidirected));
}

bool exchangeability_holds(ScenarioKind kind, int horizon, int i, int k, const Regime& regime) {
  require_horizon(horizon);
  if (i < 1 || i > horizon || k < 1 || k > horizon)
    throw Error(ErrorCode::PeriodOutOfRange, "periods i, k must lie in 1.." + std::to_string(horizon));
  regime.validate(horizon);

  for (const auto& component : regime.components()) {
    const auto g = build_amwn(kind, horizon, component);
    NodeSet given;
    for (int t = 1; t < k; ++t) given.insert(NodeLabel::treatment(t));
    for (int t = 1; t <= k; ++t) given.insert(NodeLabel::outcome(t));
    if (g.contains(NodeLabel::confounder())) given.insert(NodeLabel::confounder());

    auto target = NodeLabel::counterfactual(i);
    if (!g.contains(target)) {
      target = NodeLabel::outcome(i);
      if (given.contains(target)) continue;
    }
    if (!m_separated(g, {target}, {NodeLabel::treatment(k)}, given)) return false;
  }
  return true;
}

std::vector<std::vector<bool>> exchangeability_table(ScenarioKind kind, int horizon,
                                                     const Regime& regime) {
  require_horizon(horizon);
  std::vector<std::vector<bool>> table(static_cast<std::size_t>(horizon),
                                       std::vector<bool>(static_cast<std::size_t>(horizon)));
  for (int i = 1; i <= horizon; ++i)
    for (int k = 1; k <= horizon; ++k)
      table[i - 1][k - 1] = exchangeability_holds(kind, horizon, i, k, regime);
  return table;
}

}  // namespace tte
