#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tte {

enum class NodeKind {
  Treatment,              // X_t
  Outcome,                // Y_t
  CounterfactualOutcome,  // Y_t under an intervention
  BaselineConfounder,     // C
  LatentTreatmentCause,   // A
  LatentOutcomeCause,     // B
};

/// Structural node identity. Period is 0 for the time-invariant nodes C, A, B.
struct NodeLabel {
  NodeKind kind = NodeKind::Treatment;
  int period = 0;

  auto operator<=>(const NodeLabel&) const = default;

  static NodeLabel treatment(int t) { return {NodeKind::Treatment, t}; }
  static NodeLabel outcome(int t) { return {NodeKind::Outcome, t}; }
  static NodeLabel counterfactual(int t) { return {NodeKind::CounterfactualOutcome, t}; }
  static NodeLabel confounder() { return {NodeKind::BaselineConfounder, 0}; }
  static NodeLabel latent_treatment_cause() { return {NodeKind::LatentTreatmentCause, 0}; }
  static NodeLabel latent_outcome_cause() { return {NodeKind::LatentOutcomeCause, 0}; }

  /// X3, Y3, Yx3, C, A or B.
  std::string name() const;
  /// Inverse of name(); throws Error(ParseError) on anything else.
  static NodeLabel parse(std::string_view name);
};

using NodeSet = std::set<NodeLabel>;

struct Edge {
  NodeLabel from;
  NodeLabel to;

  auto operator<=>(const Edge&) const = default;
};

/// Acyclic directed mixed graph. Immutable once built; every query is const.
///
/// Bidirected edges are stored with `from < to` and carry arrowheads at both
/// ends. Duplicate nodes and edges in the input are merged.
class Admg {
 public:
  Admg() = default;

  /// Validates and builds. Throws Error with SelfLoop, UnknownNode or
  /// CycleDetected (directed part only).
  static Admg build(std::vector<NodeLabel> nodes, std::vector<Edge> directed,
                    std::vector<Edge> bidirected = {});

  const std::vector<NodeLabel>& nodes() const { return nodes_; }
  const std::vector<Edge>& directed_edges() const { return directed_; }
  const std::vector<Edge>& bidirected_edges() const { return bidirected_; }
  std::size_t size() const { return nodes_.size(); }

  bool contains(const NodeLabel& node) const;
  bool has_directed(const NodeLabel& from, const NodeLabel& to) const;
  bool has_bidirected(const NodeLabel& a, const NodeLabel& b) const;

  /// Throws Error(UnknownNode) when absent.
  std::size_t index_of(const NodeLabel& node) const;
  const NodeLabel& label(std::size_t index) const { return nodes_[index]; }

  std::span<const std::size_t> parents(std::size_t v) const { return parents_[v]; }
  std::span<const std::size_t> children(std::size_t v) const { return children_[v]; }
  std::span<const std::size_t> spouses(std::size_t v) const { return spouses_[v]; }

 private:
  std::vector<NodeLabel> nodes_;  // sorted
  std::vector<Edge> directed_;    // sorted
  std::vector<Edge> bidirected_;  // sorted, from < to
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::size_t>> spouses_;
};

Admg build_graph(std::vector<NodeLabel> nodes, std::vector<Edge> directed,
                 std::vector<Edge> bidirected = {});

/// `targets` plus every node with a directed path into `targets`.
NodeSet ancestors(const Admg& g, const NodeSet& targets);

/// `sources` plus every node reachable from them along directed edges.
NodeSet descendants(const Admg& g, const NodeSet& sources);

/// Graph surgery. Deletes directed edges into `remove_incoming`, bidirected
/// edges touching `remove_incoming` and directed edges out of `remove_outgoing`.
Admg mutilate(const Admg& g, const NodeSet& remove_incoming, const NodeSet& remove_outgoing);

/// Copy of `g` without `drop` and every edge touching it.
Admg remove_nodes(const Admg& g, const NodeSet& drop);

/// m-separation of `a` and `b` given `z`. The three sets must be pairwise
/// disjoint (Error OverlappingSets). An empty `a` or `b` is trivially separated.
bool m_separated(const Admg& g, const NodeSet& a, const NodeSet& b, const NodeSet& z);

/// DOT text: one node declaration per line, then `u -> v;` lines, bidirected
/// edges as `u -> v [dir=both, style=dashed];`. An empty graph is `digraph g { }`.
std::string to_dot(const Admg& g);

/// Reads back the subset of DOT emitted by to_dot.
Admg parse_dot(std::string_view text);

}  // namespace tte
