#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "coevo/graph.hpp"
#include "coevo/meta_decision.hpp"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<fs::path> corpus(const char* subdir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(fs::path(GOLDEN_DIR) / subdir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("the golden corpus is large enough") {
  CHECK(corpus("valid").size() + corpus("invalid").size() >= 20);
  CHECK(corpus("valid").size() >= 10);
  CHECK(corpus("invalid").size() >= 8);
}

TEST_CASE("every valid golden file round-trips byte-exactly") {
  for (const auto& path : corpus("valid")) {
    INFO("file: ", path.string());
    std::string text = slurp(path);
    MetaParseResult parsed = parse_meta_decision(text);
    REQUIRE(parsed.ok());
    CHECK(serialize_meta_decision(*parsed.decision) == text);
  }
}

TEST_CASE("every invalid golden file routes to the fallback") {
  for (const auto& path : corpus("invalid")) {
    INFO("file: ", path.string());
    MetaParseResult parsed = parse_meta_decision(slurp(path));
    CHECK_FALSE(parsed.ok());
    CHECK_FALSE(parsed.error.empty());
    // the documented recovery: an empty delta that keeps the run going
    MetaDecision fallback = MetaDecision::fallback();
    CHECK(fallback.delta.empty());
    CHECK(fallback.time_control == TimeControl::Continue);
  }
}

TEST_CASE("an over-budget pair list parses and truncates downstream") {
  std::string text = slurp(fs::path(GOLDEN_DIR) / "valid" /
                           "three_pairs_over_budget.json");
  MetaParseResult parsed = parse_meta_decision(text);
  REQUIRE(parsed.ok());
  CHECK(parsed.decision->delta.birth_death_pairs.size() == 3);
  AgentGraph g = init_graph({"a", "b", "sink"}, "sink");
  ValidationReport report =
      validate_delta(g, parsed.decision->delta, EditBudget{});
  CHECK(report.truncated.birth_death_pairs.size() <= 2);
  bool saw_budget = false;
  for (const auto& v : report.violations)
    if (v.code == ViolationCode::PairBudgetExceeded) saw_budget = true;
  CHECK(saw_budget);
}

TEST_CASE("time_control names round-trip") {
  for (TimeControl tc :
       {TimeControl::Continue, TimeControl::SlowAgain, TimeControl::Stop}) {
    auto back = time_control_from_name(time_control_name(tc));
    REQUIRE(back.has_value());
    CHECK(*back == tc);
  }
  CHECK_FALSE(time_control_from_name("halt").has_value());
}

TEST_CASE("parse errors are specific") {
  CHECK(parse_meta_decision("nonsense").error == "invalid JSON");
  MetaParseResult missing = parse_meta_decision(R"({"graph_edit":[]})");
  CHECK(missing.error.find("missing field") != std::string::npos);
}

TEST_CASE("serialization is canonical regardless of construction order") {
  MetaDecision d;
  d.agent_feedback["zeta"] = {"p", "m"};
  d.agent_feedback["alpha"] = {"q", "n"};
  d.global_rationale = "ordering test";
  std::string once = serialize_meta_decision(d);
  MetaParseResult parsed = parse_meta_decision(once);
  REQUIRE(parsed.ok());
  CHECK(serialize_meta_decision(*parsed.decision) == once);
  CHECK(once.find("alpha") < once.find("zeta"));
}
