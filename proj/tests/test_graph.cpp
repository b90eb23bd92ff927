#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "coevo/graph.hpp"

using namespace coevo;

namespace {

const std::vector<std::string> kRoles = {"planner", "searcher", "calculator",
                                         "verifier", "reflector"};

AgentGraph five_role() { return init_graph(kRoles, "reflector"); }

// Brute-force symmetric-difference oracle for graphs without duplicate roles:
// node sets keyed by role, edge sets keyed by (role, role).
int naive_distance(const AgentGraph& a, const AgentGraph& b) {
  std::set<std::string> ra, rb;
  for (const auto& [id, n] : a.nodes) ra.insert(n.role);
  for (const auto& [id, n] : b.nodes) rb.insert(n.role);
  int d = 0;
  for (const auto& r : ra)
    if (!rb.count(r)) d++;
  for (const auto& r : rb)
    if (!ra.count(r)) d++;
  auto edge_roles = [](const AgentGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [from, to] : g.edges)
      out.insert({g.nodes.at(from).role, g.nodes.at(to).role});
    return out;
  };
  auto ea = edge_roles(a), eb = edge_roles(b);
  for (const auto& e : ea)
    if (!eb.count(e)) d++;
  for (const auto& e : eb)
    if (!ea.count(e)) d++;
  return d;
}

}  // namespace

TEST_CASE("init_graph builds the centralized five-role template") {
  AgentGraph g = five_role();
  CHECK(g.nodes.size() == 5);
  CHECK(g.edges.size() == 7);
  CHECK(g.sink == "reflector");
  CHECK(g.generation == 0);
  for (const auto& [id, node] : g.nodes) {
    CHECK(node.capability_weight == doctest::Approx(1.0));
    CHECK(node.birth_generation == 0);
  }
  // hub (first role) feeds everyone, everyone feeds the sink
  for (const auto& role : kRoles) {
    if (role != "planner") CHECK(g.has_edge("planner", role));
    if (role != "reflector") CHECK(g.has_edge(role, "reflector"));
  }
}

TEST_CASE("init_graph rejects bad inputs") {
  CHECK_THROWS_AS(init_graph({}, "reflector"), std::invalid_argument);
  CHECK_THROWS_AS(init_graph(kRoles, "missing"), std::invalid_argument);
  CHECK_THROWS_AS(init_graph(kRoles, "reflector", 3), std::invalid_argument);
}

TEST_CASE("execution_order is topological with the sink last") {
  AgentGraph g = five_role();
  std::vector<std::string> order = execution_order(g);
  CHECK(order.size() == 5);
  CHECK(order.back() == "reflector");
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [from, to] : g.edges) CHECK(pos[from] < pos[to]);
  CHECK(execution_order(g) == order);  // deterministic
}

TEST_CASE("execution_order throws on a cycle") {
  AgentGraph g = five_role();
  g.edges.insert({"reflector", "planner"});
  CHECK_THROWS(execution_order(g));
}

TEST_CASE("validate_delta drops sink deletion and reports it") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  delta.birth_death_pairs.push_back({std::string("reflector"), std::nullopt});
  ValidationReport report = validate_delta(g, delta, EditBudget{});
  CHECK_FALSE(report.clean());
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].code == ViolationCode::SinkDeletion);
  CHECK(report.truncated.empty());
}

TEST_CASE("validate_delta truncates at the pair budget") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  for (const char* role : {"researcher", "auditor", "archivist"})
    delta.birth_death_pairs.push_back({std::nullopt, NodeSpec{role, "dig", {}}});
  ValidationReport report = validate_delta(g, delta, EditBudget{});
  CHECK(report.truncated.birth_death_pairs.size() == 2);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].code == ViolationCode::PairBudgetExceeded);
}

TEST_CASE("validate_delta truncates at the edge budget") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  delta.edge_edits = {{EdgeOp::Remove, "planner", "searcher"},
                      {EdgeOp::Remove, "planner", "calculator"},
                      {EdgeOp::Remove, "planner", "verifier"},
                      {EdgeOp::Remove, "searcher", "reflector"},
                      {EdgeOp::Remove, "calculator", "reflector"}};
  ValidationReport report = validate_delta(g, delta, EditBudget{});
  CHECK(report.truncated.edge_edits.size() == 4);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].code == ViolationCode::EdgeBudgetExceeded);
}

TEST_CASE("validate_delta drops illegal edge edits") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  delta.edge_edits = {{EdgeOp::Add, "planner", "planner"},      // self loop
                      {EdgeOp::Add, "planner", "ghost"},        // dangling
                      {EdgeOp::Add, "planner", "searcher"},     // duplicate
                      {EdgeOp::Remove, "searcher", "planner"},  // missing
                      {EdgeOp::Add, "reflector", "planner"}};   // cycle
  ValidationReport report = validate_delta(g, delta, EditBudget{});
  CHECK(report.truncated.empty());
  REQUIRE(report.violations.size() == 5);
  CHECK(report.violations[0].code == ViolationCode::SelfLoop);
  CHECK(report.violations[1].code == ViolationCode::DanglingEndpoint);
  CHECK(report.violations[2].code == ViolationCode::DuplicateEdit);
  CHECK(report.violations[3].code == ViolationCode::MissingEdge);
  CHECK(report.violations[4].code == ViolationCode::CycleCreation);
}

TEST_CASE("truncated deltas always apply cleanly") {
  std::mt19937_64 rng(7);
  AgentGraph g = five_role();
  std::vector<std::string> ids;
  for (const auto& [id, n] : g.nodes) ids.push_back(id);
  for (int trial = 0; trial < 200; ++trial) {
    StructuralDelta delta;
    int pairs = static_cast<int>(rng() % 4);
    for (int i = 0; i < pairs; ++i) {
      BirthDeathPair pair;
      if (rng() % 2) pair.dead_id = ids[rng() % ids.size()];
      if (rng() % 2) pair.born = NodeSpec{"r" + std::to_string(rng() % 3), "", {}};
      delta.birth_death_pairs.push_back(pair);
    }
    int edits = static_cast<int>(rng() % 7);
    for (int i = 0; i < edits; ++i)
      delta.edge_edits.push_back({rng() % 2 ? EdgeOp::Add : EdgeOp::Remove,
                                  ids[rng() % ids.size()], ids[rng() % ids.size()]});
    ValidationReport report = validate_delta(g, delta, EditBudget{});
    AgentGraph next = apply_delta(g, report.truncated);
    CHECK(next.has_node(next.sink));
    CHECK_NOTHROW(execution_order(next));
  }
}

TEST_CASE("apply_delta births enter with weight 1 and bumped generation") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  delta.birth_death_pairs.push_back(
      {std::string("calculator"), NodeSpec{"researcher", "dig deep", {"web"}}});
  delta.edge_edits = {{EdgeOp::Add, "researcher", "verifier"}};
  AgentGraph next = apply_delta(g, delta);
  CHECK(next.generation == 1);
  CHECK_FALSE(next.has_node("calculator"));
  REQUIRE(next.has_node("researcher"));
  CHECK(next.nodes.at("researcher").capability_weight == doctest::Approx(1.0));
  CHECK(next.nodes.at("researcher").birth_generation == 1);
  CHECK(next.has_edge("researcher", "verifier"));
  // incident edges of the dead node are gone
  for (const auto& [from, to] : next.edges) {
    CHECK(from != "calculator");
    CHECK(to != "calculator");
  }
  CHECK(g.generation == 0);  // input untouched
}

TEST_CASE("apply_delta rejects unvalidated deltas") {
  AgentGraph g = five_role();
  StructuralDelta delta;
  delta.birth_death_pairs.push_back({std::string("reflector"), std::nullopt});
  CHECK_THROWS_AS(apply_delta(g, delta), std::invalid_argument);
}

TEST_CASE("topology_distance matches the brute-force oracle") {
  AgentGraph a = five_role();
  AgentGraph b = init_graph({"planner", "searcher", "verifier", "reflector"},
                            "reflector");
  CHECK(topology_distance(a, a) == 0);
  CHECK(topology_distance(a, b) == naive_distance(a, b));
  CHECK(topology_distance(b, a) == topology_distance(a, b));
}

TEST_CASE("topology_distance is a metric on random graphs") {
  std::mt19937_64 rng(11);
  auto random_graph = [&] {
    std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(2 + rng() % 4);
    AgentGraph g = init_graph(pool, pool.back());
    // random edge removals keep it a DAG
    while (g.edges.size() > 1 && rng() % 2) {
      auto it = g.edges.begin();
      std::advance(it, rng() % g.edges.size());
      if (it->second == g.sink && rng() % 2) continue;
      g.edges.erase(it);
    }
    return g;
  };
  for (int trial = 0; trial < 100; ++trial) {
    AgentGraph x = random_graph(), y = random_graph(), z = random_graph();
    int dxy = topology_distance(x, y);
    int dyx = topology_distance(y, x);
    int dxz = topology_distance(x, z);
    int dzy = topology_distance(z, y);
    CHECK(dxy == dyx);
    CHECK(dxy >= 0);
    CHECK(topology_distance(x, x) == 0);
    CHECK(dxy <= dxz + dzy);
    CHECK(dxy == naive_distance(x, y));
  }
}

TEST_CASE("single structural edits move the distance by a bounded amount") {
  AgentGraph g = five_role();
  StructuralDelta birth;
  birth.birth_death_pairs.push_back({std::nullopt, NodeSpec{"researcher", "", {}}});
  CHECK(topology_distance(g, apply_delta(g, birth)) == 1);
  StructuralDelta add;
  add.edge_edits = {{EdgeOp::Add, "searcher", "verifier"}};
  CHECK(topology_distance(g, apply_delta(g, add)) == 1);
}

TEST_CASE("graph JSON round-trips byte-exactly") {
  AgentGraph g = five_role();
  g.nodes.at("planner").capability_weight = 0.25;
  g.nodes.at("planner").capability_memory.push_back("note");
  std::string once = graph_to_json(g).dump();
  AgentGraph back = graph_from_json(graph_to_json(g));
  CHECK(graph_to_json(back).dump() == once);
  CHECK(back.nodes.at("planner").capability_weight == doctest::Approx(0.25));
  CHECK(back.sink == g.sink);
  CHECK(back.edges == g.edges);
}

TEST_CASE("assign_node_id numbers duplicate roles") {
  AgentGraph g = five_role();
  CHECK(assign_node_id(g, "researcher") == "researcher");
  CHECK(assign_node_id(g, "planner") == "planner#2");
  StructuralDelta delta;
  delta.birth_death_pairs.push_back({std::nullopt, NodeSpec{"planner", "", {}}});
  AgentGraph next = apply_delta(g, delta);
  CHECK(next.has_node("planner#2"));
  CHECK(assign_node_id(next, "planner") == "planner#3");
}

TEST_CASE("node cap is enforced") {
  AgentGraph g = init_graph({"a", "b"}, "b", 2);
  StructuralDelta delta;
  delta.birth_death_pairs.push_back({std::nullopt, NodeSpec{"c", "", {}}});
  ValidationReport report = validate_delta(g, delta, EditBudget{});
  CHECK_FALSE(report.clean());
  CHECK(report.violations[0].code == ViolationCode::NodeCapExceeded);
  CHECK(report.truncated.empty());
}
