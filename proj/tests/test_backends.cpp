#include <doctest.h>

#include <string>

#include "coevo/backends.hpp"
#include "coevo/http_backend.hpp"
#include "coevo/prompts.hpp"

using namespace coevo;

TEST_CASE("rubric_score honors the operator per item") {
  Rubric rubric = {{RubricOp::Correctness, "mentions the year"},
                   {RubricOp::Contradiction, "claims the wrong author"}};
  // correctness passes on true, contradiction passes on false
  CHECK(rubric_score(rubric, {true, false}) == doctest::Approx(1.0));
  CHECK(rubric_score(rubric, {true, true}) == doctest::Approx(0.5));
  CHECK(rubric_score(rubric, {false, true}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rubric_score({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(rubric_score(rubric, {true}), std::invalid_argument);
}

TEST_CASE("judge verdict parsing is strict") {
  auto ok = parse_judge_verdict(R"({"score": 0.7, "reason": "solid evidence"})");
  REQUIRE(ok.has_value());
  CHECK(ok->score == doctest::Approx(0.7));
  CHECK(ok->reason == "solid evidence");

  auto clamped = parse_judge_verdict(R"({"score": 1.4, "reason": "x"})");
  REQUIRE(clamped.has_value());
  CHECK(clamped->score == doctest::Approx(1.0));

  CHECK_FALSE(parse_judge_verdict("not json").has_value());
  CHECK_FALSE(parse_judge_verdict(R"({"score": 0.5})").has_value());
  CHECK_FALSE(parse_judge_verdict(R"({"score": "high", "reason": "x"})").has_value());
  CHECK_FALSE(parse_judge_verdict(R"([0.5, "x"])").has_value());
}

TEST_CASE("rubric result parsing checks the length") {
  auto ok = parse_rubric_results(R"({"results":[true,false,true]})", 3);
  REQUIRE(ok.has_value());
  CHECK((*ok) == std::vector<bool>{true, false, true});
  CHECK_FALSE(parse_rubric_results(R"({"results":[true]})", 3).has_value());
  CHECK_FALSE(parse_rubric_results(R"({"results":[1,0,1]})", 3).has_value());
  CHECK_FALSE(parse_rubric_results(R"({"verdicts":[true]})", 1).has_value());
}

TEST_CASE("fill_slots replaces known slots and keeps literal braces") {
  std::string out = prompts::fill_slots("ask {who} about {what} in {\"json\":1}",
                                        {{"who", "the judge"}, {"what", "scores"}});
  CHECK(out == "ask the judge about scores in {\"json\":1}");
  CHECK(prompts::fill_slots("{missing}", {}) == "{missing}");
}

TEST_CASE("the meta prompt carries the structured output contract") {
  MetaSnapshot snapshot;
  snapshot.task_description = "find the author";
  snapshot.graph = init_graph({"planner", "reflector"}, "reflector");
  snapshot.per_agent_summaries["planner"] = "r0 c=0.4";
  snapshot.round_scores = {0.2, 0.4};
  auto messages = assemble_meta_prompt(snapshot);
  REQUIRE(messages.size() == 3);
  CHECK(messages[0].role == "system");
  CHECK(messages[1].role == "developer");
  CHECK(messages[2].role == "user");

  const std::string& system = messages[0].content;
  CHECK(system.find("birth_death_pairs") != std::string::npos);
  CHECK(system.find("graph_edit") != std::string::npos);
  CHECK(system.find("graph_diff") != std::string::npos);
  CHECK(system.find("agent_feedback") != std::string::npos);
  CHECK(system.find("global_rationale") != std::string::npos);
  CHECK(system.find("time_control") != std::string::npos);
  CHECK(system.find("do NOT delete the sink agent;") != std::string::npos);
  CHECK(system.find("do NOT spawn >2 agents per slow update;") != std::string::npos);
  CHECK(system.find("do NOT edit >4 edges per slow update;") != std::string::npos);
  CHECK(system.find("{continue, slow_again, stop}") != std::string::npos);

  const std::string& user = messages[2].content;
  CHECK(user.find("find the author") != std::string::npos);
  CHECK(user.find("planner") != std::string::npos);
  CHECK(user.find("{task_description}") == std::string::npos);
  CHECK(user.find("{graph_json}") == std::string::npos);
}

TEST_CASE("the contribution prompt pins the score contract and anchors") {
  JudgeContext context{"the task", "searcher", "searcher", 2, nullptr};
  auto messages = assemble_contribution_prompt("some output", context);
  REQUIRE(!messages.empty());
  const std::string& text = messages.back().content;
  CHECK(text.find(R"({"score": <0~1 float>, "reason": "..."})") != std::string::npos);
  for (const char* anchor : {"- 0.0:", "- 0.3:", "- 0.5:", "- 0.7:", "- 1.0:"})
    CHECK(text.find(anchor) != std::string::npos);
  CHECK(text.find("some output") != std::string::npos);
  CHECK(text.find("Agent ID: searcher") != std::string::npos);
}

TEST_CASE("the rubric prompt keeps its literal JSON return shape") {
  Rubric rubric = {{RubricOp::Correctness, "names the capital"}};
  auto messages = assemble_rubric_prompt("Paris", rubric);
  REQUIRE(!messages.empty());
  const std::string& text = messages.back().content;
  CHECK(text.find(R"({"results":[true,false,...]})") != std::string::npos);
  CHECK(text.find("names the capital") != std::string::npos);
  CHECK(text.find("\"Paris\"") != std::string::npos);
}

TEST_CASE("scripted agents replay their table and synthesize otherwise") {
  ScriptedAgentBackend agent;
  agent.script("planner", 0, "scripted line");
  agent.fail("planner", 1);
  AgentNode node{"planner", "planner", 1.0, {}, 0};
  CHECK(agent.execute(node, {}, "q", 0) == "scripted line");
  CHECK(agent.execute(node, {"a", "b"}, "q", 2) == "[planner r2] q (+2 msgs)");
  CHECK_THROWS_AS(agent.execute(node, {}, "q", 1), BackendError);
}

TEST_CASE("the landscape agent tags role and emits a final answer line") {
  LandscapeAgentBackend agent;
  AgentNode node{"reflector", "reflector", 1.0, {}, 0};
  std::string out = agent.execute(node, {"x"}, "what is 2+2", 3);
  CHECK(out.find("role=reflector") != std::string::npos);
  CHECK(out.find("Final Answer: what is 2+2") != std::string::npos);
}

TEST_CASE("the landscape judge scores by fitness and bounded noise") {
  FitnessLandscape land = make_standard_landscape(0.05);
  AgentGraph g = land.optima[0].topology;
  LandscapeJudgeBackend judge(land, 99);
  std::map<std::string, double> w;
  for (const auto& [id, n] : g.nodes) w[id] = n.capability_weight;
  FitnessVector f = land.eval(to_frequencies(w), g);
  JudgeContext context{"q", g.sink, g.nodes.at(g.sink).role, 0, &g};
  for (int i = 0; i < 100; ++i) {
    JudgeVerdict v = judge.contribution("out", context);
    CHECK(std::abs(v.score - f.at(g.sink)) <= 0.05 + 1e-12);
  }
  Rubric rubric = {{RubricOp::Correctness, "x"}, {RubricOp::Contradiction, "y"}};
  std::vector<bool> verdicts = judge.rubric_verdicts("answer", rubric);
  CHECK(verdicts == std::vector<bool>{false, false});
}

TEST_CASE("scripted judge maps answer scores to rubric pass counts") {
  ScriptedJudgeBackend judge;
  judge.script_contribution("a", 0, 0.9);
  JudgeContext context{"q", "a", "role", 0, nullptr};
  CHECK(judge.contribution("x", context).score == doctest::Approx(0.9));
  JudgeContext other{"q", "b", "role", 0, nullptr};
  CHECK(judge.contribution("x", other).score == doctest::Approx(0.5));

  judge.script_answer_scores({0.0, 0.5, 1.0});
  Rubric rubric = {{RubricOp::Correctness, "1"}, {RubricOp::Correctness, "2"}};
  CHECK(judge_answer(judge, "ans", rubric) == doctest::Approx(0.0));
  CHECK(judge_answer(judge, "ans", rubric) == doctest::Approx(0.5));
  CHECK(judge_answer(judge, "ans", rubric) == doctest::Approx(1.0));
  CHECK(judge_answer(judge, "ans", rubric) == doctest::Approx(1.0));  // repeats last
}

TEST_CASE("the oracle meta backend emits budget-clean decisions") {
  FitnessLandscape land = make_standard_landscape(0.0);
  std::mt19937_64 rng(31);
  OracleMetaBackend meta(land, 0.8, 31);
  meta.script_time_control({TimeControl::Continue, TimeControl::Stop});
  MetaSnapshot snapshot;
  snapshot.graph = land.optima[0].topology;
  // push the graph off the optimum so the oracle has something to do
  StructuralDelta off;
  off.birth_death_pairs.push_back({std::nullopt, NodeSpec{"calculator", "", {}}});
  snapshot.graph = apply_delta(snapshot.graph, off);
  for (int i = 0; i < 50; ++i) {
    MetaDecision d = meta.decide(snapshot);
    ValidationReport report = validate_delta(snapshot.graph, d.delta, EditBudget{});
    CHECK(report.clean());
    if (i == 0) CHECK(d.time_control == TimeControl::Continue);
    if (i == 1) CHECK(d.time_control == TimeControl::Stop);
    if (i >= 2) CHECK(d.time_control == TimeControl::Continue);
  }
  (void)rng;
}

TEST_CASE("the scripted meta backend repeats its last decision") {
  ScriptedMetaBackend meta;
  MetaSnapshot snapshot;
  CHECK(meta.decide(snapshot).delta.empty());  // empty queue -> fallback
  MetaDecision d;
  d.global_rationale = "only";
  d.time_control = TimeControl::SlowAgain;
  meta.enqueue(d);
  CHECK(meta.decide(snapshot).global_rationale == "only");
  CHECK(meta.decide(snapshot).global_rationale == "only");
}

TEST_CASE("http config reads its environment variables") {
  setenv("COEVO_API_BASE", "http://localhost:9000", 1);
  setenv("COEVO_MODEL", "test-model", 1);
  HttpConfig config = HttpConfig::from_env();
  CHECK(config.base_url == "http://localhost:9000");
  CHECK(config.model == "test-model");
  unsetenv("COEVO_API_BASE");
  unsetenv("COEVO_MODEL");
}
