#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace coevo {

/// One agent in the evolving system. `capability_weight` is the scalar
/// influence weight the fast loop updates; `capability_memory` holds the
/// textual refinement records (prompt deltas, memory seeds, reflections).
struct AgentNode {
  std::string id;
  std::string role;
  double capability_weight = 1.0;
  std::vector<std::string> capability_memory;
  int birth_generation = 0;
};

using Edge = std::pair<std::string, std::string>;  // (from, to)

/// Immutable-by-convention snapshot of the agent graph. Edits go through
/// apply_delta, which returns a new value with generation incremented.
struct AgentGraph {
  std::map<std::string, AgentNode> nodes;
  std::set<Edge> edges;
  std::string sink;
  int generation = 0;
  int node_cap = 20;

  bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
  bool has_edge(const std::string& from, const std::string& to) const {
    return edges.count({from, to}) > 0;
  }
};

/// Spec for a node introduced by a birth edit.
struct NodeSpec {
  std::string role;
  std::string goal;
  std::vector<std::string> tools;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// One birth/death pair. Either side may be absent: a pure birth carries no
/// dead id, a pure death carries no new-node spec.
struct BirthDeathPair {
  std::optional<std::string> dead_id;
  std::optional<NodeSpec> born;

  friend bool operator==(const BirthDeathPair&, const BirthDeathPair&) = default;
};

enum class EdgeOp { Add, Remove };

struct EdgeEdit {
  EdgeOp op = EdgeOp::Add;
  std::string from;
  std::string to;

  friend bool operator==(const EdgeEdit&, const EdgeEdit&) = default;
};

/// A bounded structural update: birth/death pairs plus edge edits.
struct StructuralDelta {
  std::vector<BirthDeathPair> birth_death_pairs;
  std::vector<EdgeEdit> edge_edits;

  bool empty() const { return birth_death_pairs.empty() && edge_edits.empty(); }
  friend bool operator==(const StructuralDelta&, const StructuralDelta&) = default;
};

/// Per-update caps on structural edits.
struct EditBudget {
  int max_birth_death_pairs = 2;
  int max_edge_edits = 4;
};

enum class ViolationCode {
  PairBudgetExceeded,
  EdgeBudgetExceeded,
  SinkDeletion,
  UnknownDeadId,
  NodeCapExceeded,
  DanglingEndpoint,
  SelfLoop,
  DuplicateEdit,
  MissingEdge,
  CycleCreation,
};

struct Violation {
  ViolationCode code;
  std::string message;
};

/// Result of validating a delta against a graph and budget. `truncated`
/// keeps legal edits in listed order up to the budget; everything dropped
/// is recorded as a violation. Validation never fails.
struct ValidationReport {
  std::vector<Violation> violations;
  StructuralDelta truncated;

  bool clean() const { return violations.empty(); }
};

/// Builds the initial centralized template: one node per role with weight 1,
/// every non-sink node wired to the sink, and the first-listed role wired to
/// every other node. Throws std::invalid_argument on bad inputs.
AgentGraph init_graph(const std::vector<std::string>& roles,
                      const std::string& sink_role, int node_cap = 20);

/// Simulates the delta edit-by-edit, dropping illegal edits and truncating
/// at the budget. The returned truncated delta always applies cleanly.
ValidationReport validate_delta(const AgentGraph& graph,
                                const StructuralDelta& delta,
                                const EditBudget& budget);

/// Applies a validated delta: deaths remove the node and incident edges,
/// births enter with capability_weight 1 and empty memory, edge edits apply
/// in order, generation increments. Throws if the delta was not validated
/// or the node cap would be exceeded.
AgentGraph apply_delta(const AgentGraph& graph, const StructuralDelta& delta);

/// Deterministic topological order: lexicographic tie-break, sink scheduled
/// last whenever possible. Throws on a cycle.
std::vector<std::string> execution_order(const AgentGraph& graph);

/// Symmetric-difference distance |V1 xor V2| + |E1 xor E2| with nodes matched
/// by role; duplicate roles within one graph are disambiguated by birth
/// generation and id so the distance stays a metric.
int topology_distance(const AgentGraph& a, const AgentGraph& b);

/// Canonical JSON: sorted node ids, sorted edge pairs, explicit sink.
/// Round-trips bit-exactly through graph_from_json.
nlohmann::json graph_to_json(const AgentGraph& graph);
AgentGraph graph_from_json(const nlohmann::json& j);

/// Id assignment for a birth: the bare role name when free, otherwise
/// role#2, role#3, ... Matches the naming used in evolution traces.
std::string assign_node_id(const AgentGraph& graph, const std::string& role);

const char* violation_code_name(ViolationCode code);

}  // namespace coevo
