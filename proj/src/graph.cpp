#include "coevo/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace coevo {

namespace {

// Is `to` an ancestor of `from` in the given edge set? Used to reject edge
// additions that would close a cycle.
bool reachable(const std::set<Edge>& edges, const std::string& from,
               const std::string& to) {
  if (from == to) return true;
  std::deque<std::string> frontier{from};
  std::set<std::string> seen{from};
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    auto it = edges.lower_bound({cur, ""});
    for (; it != edges.end() && it->first == cur; ++it) {
      if (it->second == to) return true;
      if (seen.insert(it->second).second) frontier.push_back(it->second);
    }
  }
  return false;
}

std::string assign_id_in(const std::set<std::string>& ids, const std::string& role) {
  if (!ids.count(role)) return role;
  for (int k = 2;; ++k) {
    std::string candidate = role + "#" + std::to_string(k);
    if (!ids.count(candidate)) return candidate;
  }
}

}  // namespace

const char* violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::PairBudgetExceeded: return "pair_budget_exceeded";
    case ViolationCode::EdgeBudgetExceeded: return "edge_budget_exceeded";
    case ViolationCode::SinkDeletion: return "sink_deletion";
    case ViolationCode::UnknownDeadId: return "unknown_dead_id";
    case ViolationCode::NodeCapExceeded: return "node_cap_exceeded";
    case ViolationCode::DanglingEndpoint: return "dangling_endpoint";
    case ViolationCode::SelfLoop: return "self_loop";
    case ViolationCode::DuplicateEdit: return "duplicate_edit";
    case ViolationCode::MissingEdge: return "missing_edge";
    case ViolationCode::CycleCreation: return "cycle_creation";
  }
  return "unknown";
}

std::string assign_node_id(const AgentGraph& graph, const std::string& role) {
  std::set<std::string> ids;
  for (const auto& [id, _] : graph.nodes) ids.insert(id);
  return assign_id_in(ids, role);
}

AgentGraph init_graph(const std::vector<std::string>& roles,
                      const std::string& sink_role, int node_cap) {
  if (roles.empty()) throw std::invalid_argument("init_graph: empty role list");
  if (std::find(roles.begin(), roles.end(), sink_role) == roles.end())
    throw std::invalid_argument("init_graph: sink role not in role list");
  if (static_cast<int>(roles.size()) > node_cap)
    throw std::invalid_argument("init_graph: role list exceeds node cap");

  AgentGraph g;
  g.node_cap = node_cap;
  g.sink = sink_role;
  for (const auto& role : roles) {
    if (g.nodes.count(role))
      throw std::invalid_argument("init_graph: duplicate role " + role);
    g.nodes[role] = AgentNode{role, role, 1.0, {}, 0};
  }
  const std::string& hub = roles.front();
  for (const auto& role : roles) {
    if (role != sink_role) g.edges.insert({role, sink_role});
    if (role != hub && hub != role) g.edges.insert({hub, role});
  }
  g.edges.erase({sink_role, sink_role});
  g.edges.erase({hub, hub});
  // The hub->sink edge is already covered by the all-to-sink wiring.
  return g;
}

ValidationReport validate_delta(const AgentGraph& graph,
                                const StructuralDelta& delta,
                                const EditBudget& budget) {
  ValidationReport report;
  auto flag = [&](ViolationCode code, const std::string& msg) {
    report.violations.push_back({code, msg});
  };

  // Working copy of the node-id set and edge set, updated as edits are kept.
  std::set<std::string> ids;
  for (const auto& [id, _] : graph.nodes) ids.insert(id);
  std::set<Edge> edges = graph.edges;

  std::vector<BirthDeathPair> seen_pairs;
  for (const auto& pair : delta.birth_death_pairs) {
    if (!pair.dead_id && !pair.born) continue;  // no-op pair, silently dropped
    if (static_cast<int>(report.truncated.birth_death_pairs.size()) >=
        budget.max_birth_death_pairs) {
      flag(ViolationCode::PairBudgetExceeded,
           "birth/death pair beyond budget of " +
               std::to_string(budget.max_birth_death_pairs));
      continue;
    }
    if (std::find(seen_pairs.begin(), seen_pairs.end(), pair) != seen_pairs.end()) {
      flag(ViolationCode::DuplicateEdit, "duplicate birth/death pair");
      continue;
    }
    if (pair.dead_id) {
      if (*pair.dead_id == graph.sink) {
        flag(ViolationCode::SinkDeletion,
             "pair names the sink '" + graph.sink + "' as dead");
        continue;
      }
      if (!ids.count(*pair.dead_id)) {
        flag(ViolationCode::UnknownDeadId, "unknown dead id " + *pair.dead_id);
        continue;
      }
    }
    int count_after = static_cast<int>(ids.size()) - (pair.dead_id ? 1 : 0) +
                      (pair.born ? 1 : 0);
    if (count_after > graph.node_cap) {
      flag(ViolationCode::NodeCapExceeded,
           "birth would exceed node cap " + std::to_string(graph.node_cap));
      continue;
    }
    if (pair.dead_id) {
      ids.erase(*pair.dead_id);
      for (auto it = edges.begin(); it != edges.end();) {
        if (it->first == *pair.dead_id || it->second == *pair.dead_id)
          it = edges.erase(it);
        else
          ++it;
      }
    }
    if (pair.born) ids.insert(assign_id_in(ids, pair.born->role));
    seen_pairs.push_back(pair);
    report.truncated.birth_death_pairs.push_back(pair);
  }

  for (const auto& edit : delta.edge_edits) {
    if (static_cast<int>(report.truncated.edge_edits.size()) >=
        budget.max_edge_edits) {
      flag(ViolationCode::EdgeBudgetExceeded,
           "edge edit beyond budget of " + std::to_string(budget.max_edge_edits));
      continue;
    }
    if (edit.from == edit.to) {
      flag(ViolationCode::SelfLoop, "self-loop " + edit.from);
      continue;
    }
    if (!ids.count(edit.from) || !ids.count(edit.to)) {
      flag(ViolationCode::DanglingEndpoint,
           "edge (" + edit.from + " -> " + edit.to + ") has a missing endpoint");
      continue;
    }
    if (edit.op == EdgeOp::Add) {
      if (edges.count({edit.from, edit.to})) {
        flag(ViolationCode::DuplicateEdit,
             "edge (" + edit.from + " -> " + edit.to + ") already present");
        continue;
      }
      if (reachable(edges, edit.to, edit.from)) {
        flag(ViolationCode::CycleCreation,
             "edge (" + edit.from + " -> " + edit.to + ") would create a cycle");
        continue;
      }
      edges.insert({edit.from, edit.to});
    } else {
      if (!edges.count({edit.from, edit.to})) {
        flag(ViolationCode::MissingEdge,
             "edge (" + edit.from + " -> " + edit.to + ") not present");
        continue;
      }
      edges.erase({edit.from, edit.to});
    }
    report.truncated.edge_edits.push_back(edit);
  }

  return report;
}

AgentGraph apply_delta(const AgentGraph& graph, const StructuralDelta& delta) {
  // A validated (truncated) delta re-validates clean under a budget exactly
  // as large as the delta itself.
  EditBudget exact{static_cast<int>(delta.birth_death_pairs.size()),
                   static_cast<int>(delta.edge_edits.size())};
  ValidationReport report = validate_delta(graph, delta, exact);
  if (!report.clean() || report.truncated != delta) {
    std::string why = report.violations.empty()
                          ? "delta does not match its validated form"
                          : report.violations.front().message;
    throw std::invalid_argument("apply_delta: delta not validated: " + why);
  }

  AgentGraph out = graph;
  for (const auto& pair : delta.birth_death_pairs) {
    if (pair.dead_id) {
      out.nodes.erase(*pair.dead_id);
      for (auto it = out.edges.begin(); it != out.edges.end();) {
        if (it->first == *pair.dead_id || it->second == *pair.dead_id)
          it = out.edges.erase(it);
        else
          ++it;
      }
    }
    if (pair.born) {
      std::string id = assign_node_id(out, pair.born->role);
      AgentNode node;
      node.id = id;
      node.role = pair.born->role;
      node.capability_weight = 1.0;
      node.birth_generation = graph.generation + 1;
      if (!pair.born->goal.empty())
        node.capability_memory.push_back("goal: " + pair.born->goal);
      out.nodes[id] = node;
    }
  }
  if (static_cast<int>(out.nodes.size()) > out.node_cap)
    throw std::invalid_argument("apply_delta: node cap exceeded");
  for (const auto& edit : delta.edge_edits) {
    if (edit.op == EdgeOp::Add)
      out.edges.insert({edit.from, edit.to});
    else
      out.edges.erase({edit.from, edit.to});
  }
  out.generation = graph.generation + 1;
  return out;
}

std::vector<std::string> execution_order(const AgentGraph& graph) {
  std::map<std::string, int> indegree;
  for (const auto& [id, _] : graph.nodes) indegree[id] = 0;
  for (const auto& [from, to] : graph.edges) indegree[to]++;

  // Min-heap on id; the sink is deprioritized so it lands last whenever the
  // edge relation allows it.
  auto later = [&](const std::string& a, const std::string& b) {
    bool a_sink = (a == graph.sink), b_sink = (b == graph.sink);
    if (a_sink != b_sink) return a_sink;
    return a > b;
  };
  std::priority_queue<std::string, std::vector<std::string>, decltype(later)>
      ready(later);
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push(id);

  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string cur = ready.top();
    ready.pop();
    order.push_back(cur);
    auto it = graph.edges.lower_bound({cur, ""});
    for (; it != graph.edges.end() && it->first == cur; ++it) {
      if (--indegree[it->second] == 0) ready.push(it->second);
    }
  }
  if (order.size() != graph.nodes.size())
    throw std::runtime_error("execution_order: cycle detected");
  return order;
}

namespace {

// Role-based node keys; duplicate roles within one graph are numbered by
// (birth_generation, id) so both sides key deterministically.
std::map<std::string, std::string> node_keys(const AgentGraph& g) {
  std::map<std::string, std::vector<const AgentNode*>> by_role;
  for (const auto& [id, node] : g.nodes) by_role[node.role].push_back(&node);
  std::map<std::string, std::string> keys;
  for (auto& [role, group] : by_role) {
    if (group.size() == 1) {
      keys[group.front()->id] = role;
      continue;
    }
    std::sort(group.begin(), group.end(), [](const AgentNode* a, const AgentNode* b) {
      return std::tie(a->birth_generation, a->id) < std::tie(b->birth_generation, b->id);
    });
    for (size_t i = 0; i < group.size(); ++i)
      keys[group[i]->id] = role + "#" + std::to_string(i + 1);
  }
  return keys;
}

}  // namespace

int topology_distance(const AgentGraph& a, const AgentGraph& b) {
  auto ka = node_keys(a), kb = node_keys(b);
  std::vector<std::string> na, nb;
  for (const auto& [_, k] : ka) na.push_back(k);
  for (const auto& [_, k] : kb) nb.push_back(k);
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  std::vector<std::string> node_diff;
  std::set_symmetric_difference(na.begin(), na.end(), nb.begin(), nb.end(),
                                std::back_inserter(node_diff));

  std::vector<Edge> ea, eb;
  for (const auto& [from, to] : a.edges) ea.push_back({ka.at(from), ka.at(to)});
  for (const auto& [from, to] : b.edges) eb.push_back({kb.at(from), kb.at(to)});
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  std::vector<Edge> edge_diff;
  std::set_symmetric_difference(ea.begin(), ea.end(), eb.begin(), eb.end(),
                                std::back_inserter(edge_diff));

  return static_cast<int>(node_diff.size() + edge_diff.size());
}

nlohmann::json graph_to_json(const AgentGraph& graph) {
  nlohmann::json nodes = nlohmann::json::object();
  for (const auto& [id, node] : graph.nodes) {
    nodes[id] = {{"role", node.role},
                 {"capability_weight", node.capability_weight},
                 {"capability_memory", node.capability_memory},
                 {"birth_generation", node.birth_generation}};
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [from, to] : graph.edges)  // std::set iterates sorted
    edges.push_back({from, to});
  return {{"nodes", nodes},
          {"edges", edges},
          {"sink", graph.sink},
          {"generation", graph.generation},
          {"node_cap", graph.node_cap}};
}

AgentGraph graph_from_json(const nlohmann::json& j) {
  AgentGraph g;
  g.sink = j.at("sink").get<std::string>();
  g.generation = j.at("generation").get<int>();
  g.node_cap = j.at("node_cap").get<int>();
  for (const auto& [id, nj] : j.at("nodes").items()) {
    AgentNode node;
    node.id = id;
    node.role = nj.at("role").get<std::string>();
    node.capability_weight = nj.at("capability_weight").get<double>();
    node.capability_memory = nj.at("capability_memory").get<std::vector<std::string>>();
    node.birth_generation = nj.at("birth_generation").get<int>();
    g.nodes[id] = node;
  }
  for (const auto& ej : j.at("edges"))
    g.edges.insert({ej.at(0).get<std::string>(), ej.at(1).get<std::string>()});
  return g;
}

}  // namespace coevo
