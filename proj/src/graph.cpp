#include "tte/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>

#include "tte/error.hpp"

namespace tte {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_period(std::string_view digits, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || value < 1)
    throw Error(ErrorCode::ParseError, "bad node name '" + std::string(whole) + "'");
  return value;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string NodeLabel::name() const {
  switch (kind) {
    case NodeKind::Treatment: return "X" + std::to_string(period);
    case NodeKind::Outcome: return "Y" + std::to_string(period);
    case NodeKind::CounterfactualOutcome: return "Yx" + std::to_string(period);
    case NodeKind::BaselineConfounder: return "C";
    case NodeKind::LatentTreatmentCause: return "A";
    case NodeKind::LatentOutcomeCause: return "B";
  }
  return "?";
}

NodeLabel NodeLabel::parse(std::string_view name) {
  if (name == "C") return confounder();
  if (name == "A") return latent_treatment_cause();
  if (name == "B") return latent_outcome_cause();
  if (name.starts_with("Yx")) return counterfactual(parse_period(name.substr(2), name));
  if (name.starts_with("Y")) return outcome(parse_period(name.substr(1), name));
  if (name.starts_with("X")) return treatment(parse_period(name.substr(1), name));
  throw Error(ErrorCode::ParseError, "bad node name '" + std::string(name) + "'");
}

Admg Admg::build(std::vector<NodeLabel> nodes, std::vector<Edge> directed,
                 std::vector<Edge> bidirected) {
  Admg g;
  sort_unique(nodes);
  g.nodes_ = std::move(nodes);

  for (auto& e : bidirected)
    if (e.to < e.from) std::swap(e.from, e.to);
  sort_unique(directed);
  sort_unique(bidirected);

  const auto n = g.nodes_.size();
  g.parents_.assign(n, {});
  g.children_.assign(n, {});
  g.spouses_.assign(n, {});

  auto endpoints = [&g](const Edge& e) {
    if (e.from == e.to) throw Error(ErrorCode::SelfLoop, "self-loop on " + e.from.name());
    if (!g.contains(e.from)) throw Error(ErrorCode::UnknownNode, "unknown node " + e.from.name());
    if (!g.contains(e.to)) throw Error(ErrorCode::UnknownNode, "unknown node " + e.to.name());
    return std::pair{g.index_of(e.from), g.index_of(e.to)};
  };
  for (const auto& e : directed) {
    auto [u, v] = endpoints(e);
    g.children_[u].push_back(v);
    g.parents_[v].push_back(u);
  }
  for (const auto& e : bidirected) {
    auto [u, v] = endpoints(e);
    g.spouses_[u].push_back(v);
    g.spouses_[v].push_back(u);
  }

  // Kahn's algorithm; anything left unvisited sits on a directed cycle.
  std::vector<std::size_t> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = g.parents_[v].size();
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto v = ready.front();
    ready.pop_front();
    ++visited;
    for (auto c : g.children_[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (visited != n) {
    std::string members;
    for (std::size_t v = 0; v < n; ++v)
      if (indegree[v] > 0) members += (members.empty() ? "" : ",") + g.nodes_[v].name();
    throw Error(ErrorCode::CycleDetected, "directed cycle through {" + members + "}");
  }

  g.directed_ = std::move(directed);
  g.bidirected_ = std::move(bidirected);
  return g;
}

bool Admg::contains(const NodeLabel& node) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

bool Admg::has_directed(const NodeLabel& from, const NodeLabel& to) const {
  return std::binary_search(directed_.begin(), directed_.end(), Edge{from, to});
}

bool Admg::has_bidirected(const NodeLabel& a, const NodeLabel& b) const {
  const Edge e = a < b ? Edge{a, b} : Edge{b, a};
  return std::binary_search(bidirected_.begin(), bidirected_.end(), e);
}

std::size_t Admg::index_of(const NodeLabel& node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node)
    throw Error(ErrorCode::UnknownNode, "unknown node " + node.name());
  return static_cast<std::size_t>(it - nodes_.begin());
}

Admg build_graph(std::vector<NodeLabel> nodes, std::vector<Edge> directed,
                 std::vector<Edge> bidirected) {
  return Admg::build(std::move(nodes), std::move(directed), std::move(bidirected));
}

namespace {

std::vector<char> closure(const Admg& g, const NodeSet& seeds, bool upward) {
  std::vector<char> mark(g.size(), 0);
  std::vector<std::size_t> stack;
  for (const auto& s : seeds) {
    const auto i = g.index_of(s);
    if (!mark[i]) {
      mark[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : upward ? g.parents(v) : g.children(v)) {
      if (!mark[w]) {
        mark[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return mark;
}

NodeSet to_set(const Admg& g, const std::vector<char>& mark) {
  NodeSet out;
  for (std::size_t i = 0; i < mark.size(); ++i)
    if (mark[i]) out.insert(g.label(i));
  return out;
}

void require_known(const Admg& g, const NodeSet& s) {
  for (const auto& v : s) (void)g.index_of(v);
}

}  // namespace

NodeSet ancestors(const Admg& g, const NodeSet& targets) {
  return to_set(g, closure(g, targets, true));
}

NodeSet descendants(const Admg& g, const NodeSet& sources) {
  return to_set(g, closure(g, sources, false));
}

Admg mutilate(const Admg& g, const NodeSet& remove_incoming, const NodeSet& remove_outgoing) {
  require_known(g, remove_incoming);
  require_known(g, remove_outgoing);
  std::vector<Edge> directed;
  for (const auto& e : g.directed_edges())
    if (!remove_incoming.contains(e.to) && !remove_outgoing.contains(e.from))
      directed.push_back(e);
  std::vector<Edge> bidirected;
  for (const auto& e : g.bidirected_edges())
    if (!remove_incoming.contains(e.from) && !remove_incoming.contains(e.to))
      bidirected.push_back(e);
  return Admg::build(g.nodes(), std::move(directed), std::move(bidirected));
}

Admg remove_nodes(const Admg& g, const NodeSet& drop) {
  require_known(g, drop);
  std::vector<NodeLabel> nodes;
  for (const auto& v : g.nodes())
    if (!drop.contains(v)) nodes.push_back(v);
  auto keep = [&drop](const Edge& e) { return !drop.contains(e.from) && !drop.contains(e.to); };
  std::vector<Edge> directed, bidirected;
  std::copy_if(g.directed_edges().begin(), g.directed_edges().end(),
               std::back_inserter(directed), keep);
  std::copy_if(g.bidirected_edges().begin(), g.bidirected_edges().end(),
               std::back_inserter(bidirected), keep);
  return Admg::build(std::move(nodes), std::move(directed), std::move(bidirected));
}

bool m_separated(const Admg& g, const NodeSet& a, const NodeSet& b, const NodeSet& z) {
  require_known(g, a);
  require_known(g, b);
  require_known(g, z);
  auto overlaps = [](const NodeSet& s, const NodeSet& t) {
    return std::any_of(s.begin(), s.end(), [&t](const NodeLabel& v) { return t.contains(v); });
  };
  if (overlaps(a, b) || overlaps(a, z) || overlaps(b, z))
    throw Error(ErrorCode::OverlappingSets, "separation sets must be pairwise disjoint");
  if (a.empty() || b.empty()) return true;

  const auto n = g.size();
  std::vector<char> in_z(n, 0), in_b(n, 0);
  for (const auto& v : z) in_z[g.index_of(v)] = 1;
  for (const auto& v : b) in_b[g.index_of(v)] = 1;
  const auto anc_z = closure(g, z, true);

  // Reachability over (node, arrowhead-at-node) states. A node entered with an
  // arrowhead and left through another arrowhead is a collider on that walk.
  std::vector<char> seen(2 * n, 0);
  std::vector<std::pair<std::size_t, bool>> stack;
  auto push = [&](std::size_t v, bool head) {
    const auto key = 2 * v + (head ? 1 : 0);
    if (!seen[key]) {
      seen[key] = 1;
      stack.emplace_back(v, head);
    }
  };

  for (const auto& s : a) {
    const auto v = g.index_of(s);
    for (auto p : g.parents(v)) push(p, false);
    for (auto c : g.children(v)) push(c, true);
    for (auto w : g.spouses(v)) push(w, true);
  }
  while (!stack.empty()) {
    const auto [v, head] = stack.back();
    stack.pop_back();
    if (in_b[v]) return false;
    // Leaving through a tail: v is a non-collider and must not be conditioned on.
    if (!in_z[v]) {
      for (auto c : g.children(v)) push(c, true);
    }
    // Leaving through an arrowhead at v (towards a parent or a spouse).
    const bool collider = head;
    const bool pass = collider ? static_cast<bool>(anc_z[v]) : !in_z[v];
    if (pass) {
      for (auto p : g.parents(v)) push(p, false);
      for (auto w : g.spouses(v)) push(w, true);
    }
  }
  return true;
}

std::string to_dot(const Admg& g) {
  if (g.size() == 0) return "digraph g { }\n";
  std::ostringstream out;
  out << "digraph g {\n";
  for (const auto& v : g.nodes()) out << "  " << v.name() << ";\n";
  for (const auto& e : g.directed_edges())
    out << "  " << e.from.name() << " -> " << e.to.name() << ";\n";
  for (const auto& e : g.bidirected_edges())
    out << "  " << e.from.name() << " -> " << e.to.name() << " [dir=both, style=dashed];\n";
  out << "}\n";
  return out.str();
}

Admg parse_dot(std::string_view text) {
  std::vector<NodeLabel> nodes;
  std::vector<Edge> directed, bidirected;
  bool opened = false;
  bool closed = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;

    if (!opened) {
      if (!line.starts_with("digraph")) throw Error(ErrorCode::ParseError, "expected 'digraph'");
      opened = true;
      const auto brace = line.find('{');
      if (brace == std::string_view::npos) throw Error(ErrorCode::ParseError, "expected '{'");
      line = trim(line.substr(brace + 1));
      if (line.empty()) continue;
    }
    if (line == "}") {
      closed = true;
      break;
    }
    if (closed) throw Error(ErrorCode::ParseError, "content after closing brace");
    if (!line.ends_with(";")) throw Error(ErrorCode::ParseError, "missing ';' in '" + std::string(line) + "'");
    line = trim(line.substr(0, line.size() - 1));

    bool both = false;
    if (const auto attr = line.find('['); attr != std::string_view::npos) {
      const auto attrs = line.substr(attr);
      both = attrs.find("dir=both") != std::string_view::npos;
      line = trim(line.substr(0, attr));
    }
    if (const auto arrow = line.find("->"); arrow != std::string_view::npos) {
      Edge e{NodeLabel::parse(trim(line.substr(0, arrow))),
             NodeLabel::parse(trim(line.substr(arrow + 2)))};
      (both ? bidirected : directed).push_back(e);
    } else {
      nodes.push_back(NodeLabel::parse(line));
    }
  }
  if (!opened) throw Error(ErrorCode::ParseError, "empty DOT input");
  if (!closed) throw Error(ErrorCode::ParseError, "missing closing brace");
  return Admg::build(std::move(nodes), std::move(directed), std::move(bidirected));
}

}  // namespace tte
