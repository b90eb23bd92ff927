#include "coevo/meta_decision.hpp"

#include <algorithm>

namespace coevo {

namespace {

using nlohmann::json;

struct SchemaError {
  std::string message;
};

void require_keys(const json& obj, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional,
                  const std::string& where) {
  if (!obj.is_object()) throw SchemaError{where + " must be an object"};
  for (const auto& key : required)
    if (!obj.contains(key)) throw SchemaError{where + " missing field " + key};
  for (const auto& [key, _] : obj.items()) {
    if (std::find(required.begin(), required.end(), key) == required.end() &&
        std::find(optional.begin(), optional.end(), key) == optional.end())
      throw SchemaError{where + " has unknown field " + key};
  }
}

std::string require_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError{where + " must be a string"};
  return v.get<std::string>();
}

NodeSpec parse_node_spec(const json& v) {
  require_keys(v, {"role"}, {"goal", "tools"}, "v_new");
  NodeSpec spec;
  spec.role = require_string(v.at("role"), "v_new.role");
  if (v.contains("goal")) spec.goal = require_string(v.at("goal"), "v_new.goal");
  if (v.contains("tools")) {
    if (!v.at("tools").is_array()) throw SchemaError{"v_new.tools must be an array"};
    for (const auto& t : v.at("tools"))
      spec.tools.push_back(require_string(t, "v_new.tools entry"));
  }
  return spec;
}

MetaDecision parse_checked(const json& root) {
  require_keys(root,
               {"birth_death_pairs", "graph_edit", "graph_diff",
                "agent_feedback", "global_rationale", "time_control"},
               {}, "decision");

  MetaDecision out;

  const json& pairs = root.at("birth_death_pairs");
  if (!pairs.is_array()) throw SchemaError{"birth_death_pairs must be an array"};
  for (const auto& pj : pairs) {
    require_keys(pj, {"v_dead", "v_new"}, {}, "birth_death_pairs entry");
    BirthDeathPair pair;
    if (!pj.at("v_dead").is_null())
      pair.dead_id = require_string(pj.at("v_dead"), "v_dead");
    if (!pj.at("v_new").is_null()) pair.born = parse_node_spec(pj.at("v_new"));
    out.delta.birth_death_pairs.push_back(std::move(pair));
  }

  const json& edits = root.at("graph_edit");
  if (!edits.is_array()) throw SchemaError{"graph_edit must be an array"};
  for (const auto& ej : edits) {
    require_keys(ej, {"op", "from", "to"}, {}, "graph_edit entry");
    std::string op = require_string(ej.at("op"), "graph_edit.op");
    EdgeEdit edit;
    if (op == "edge_add")
      edit.op = EdgeOp::Add;
    else if (op == "edge_remove")
      edit.op = EdgeOp::Remove;
    else
      throw SchemaError{"graph_edit.op must be edge_add or edge_remove"};
    edit.from = require_string(ej.at("from"), "graph_edit.from");
    edit.to = require_string(ej.at("to"), "graph_edit.to");
    out.delta.edge_edits.push_back(std::move(edit));
  }

  if (!root.at("graph_diff").is_object())
    throw SchemaError{"graph_diff must be an object"};
  require_keys(root.at("graph_diff"), {},
               {"nodes_added", "nodes_removed", "edges_added", "edges_removed"},
               "graph_diff");
  out.graph_diff = root.at("graph_diff");

  const json& feedback = root.at("agent_feedback");
  if (!feedback.is_object()) throw SchemaError{"agent_feedback must be an object"};
  for (const auto& [agent_id, fj] : feedback.items()) {
    require_keys(fj, {}, {"prompt_delta", "memory_seed"},
                 "agent_feedback." + agent_id);
    AgentFeedback fb;
    if (fj.contains("prompt_delta"))
      fb.prompt_delta = require_string(fj.at("prompt_delta"), "prompt_delta");
    if (fj.contains("memory_seed"))
      fb.memory_seed = require_string(fj.at("memory_seed"), "memory_seed");
    out.agent_feedback[agent_id] = std::move(fb);
  }

  out.global_rationale =
      require_string(root.at("global_rationale"), "global_rationale");

  std::string tc = require_string(root.at("time_control"), "time_control");
  auto parsed = time_control_from_name(tc);
  if (!parsed)
    throw SchemaError{"time_control must be continue, slow_again, or stop"};
  out.time_control = *parsed;

  return out;
}

}  // namespace

const char* time_control_name(TimeControl tc) {
  switch (tc) {
    case TimeControl::Continue: return "continue";
    case TimeControl::SlowAgain: return "slow_again";
    case TimeControl::Stop: return "stop";
  }
  return "continue";
}

std::optional<TimeControl> time_control_from_name(const std::string& name) {
  if (name == "continue") return TimeControl::Continue;
  if (name == "slow_again") return TimeControl::SlowAgain;
  if (name == "stop") return TimeControl::Stop;
  return std::nullopt;
}

MetaParseResult parse_meta_decision(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) return {std::nullopt, "invalid JSON"};
  try {
    return {parse_checked(root), ""};
  } catch (const SchemaError& e) {
    return {std::nullopt, e.message};
  }
}

nlohmann::json meta_decision_to_json(const MetaDecision& decision) {
  json pairs = json::array();
  for (const auto& pair : decision.delta.birth_death_pairs) {
    json pj;
    pj["v_dead"] = pair.dead_id ? json(*pair.dead_id) : json(nullptr);
    if (pair.born) {
      pj["v_new"] = {{"role", pair.born->role},
                     {"goal", pair.born->goal},
                     {"tools", pair.born->tools}};
    } else {
      pj["v_new"] = nullptr;
    }
    pairs.push_back(std::move(pj));
  }
  json edits = json::array();
  for (const auto& edit : decision.delta.edge_edits) {
    edits.push_back({{"op", edit.op == EdgeOp::Add ? "edge_add" : "edge_remove"},
                     {"from", edit.from},
                     {"to", edit.to}});
  }
  json feedback = json::object();
  for (const auto& [agent_id, fb] : decision.agent_feedback)
    feedback[agent_id] = {{"prompt_delta", fb.prompt_delta},
                          {"memory_seed", fb.memory_seed}};
  return {{"birth_death_pairs", pairs},
          {"graph_edit", edits},
          {"graph_diff", decision.graph_diff},
          {"agent_feedback", feedback},
          {"global_rationale", decision.global_rationale},
          {"time_control", time_control_name(decision.time_control)}};
}

std::string serialize_meta_decision(const MetaDecision& decision) {
  return meta_decision_to_json(decision).dump();
}

}  // namespace coevo
