#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "coevo/analysis.hpp"
#include "coevo/backends.hpp"
#include "coevo/orchestrator.hpp"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

struct TraceDir {
  fs::path dir;
  TraceDir() {
    dir = fs::temp_directory_path() /
          ("coevo_analysis_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TraceDir() { fs::remove_all(dir); }
};

RunConfig small_config() {
  RunConfig config;
  config.roles = {"planner", "searcher", "reflector"};
  config.sink_role = "reflector";
  config.round_cap = 6;
  config.slow_interval = 2;
  return config;
}

std::string write_trace(const fs::path& path, const RunConfig& config,
                        double answer_score_final) {
  ScriptedAgentBackend agent;
  ScriptedJudgeBackend judge;
  ScriptedMetaBackend meta;
  Backends backends{&agent, &judge, &meta};
  std::vector<double> scores(static_cast<size_t>(config.round_cap), 0.0);
  scores.back() = answer_score_final;
  judge.script_answer_scores(scores);

  AgentGraph initial = init_graph(config.roles, config.sink_role);
  std::ofstream out(path);
  out << trace_header_json(config, initial, "q").dump() << "\n";
  InstanceResult result =
      run_instance("q", config, backends, [&](const RoundTrace& trace) {
        out << round_trace_to_json(trace).dump() << "\n";
      });
  out << instance_result_json(result).dump() << "\n";
  return stop_reason_name(result.stop_reason);
}

}  // namespace

TEST_CASE("analyze aggregates traces into the report") {
  TraceDir tmp;
  RunConfig config = small_config();
  std::string reason_a = write_trace(tmp.dir / "a.jsonl", config, 0.0);
  std::string reason_b = write_trace(tmp.dir / "b.jsonl", config, 1.0);
  CHECK(reason_a == "budget_exhausted");
  CHECK(reason_b == "threshold");

  AnalysisReport report =
      analyze({(tmp.dir / "a.jsonl").string(), (tmp.dir / "b.jsonl").string()});
  CHECK(report.files == 2);
  CHECK(report.lines_skipped == 0);
  CHECK(report.lines_consumed == 2 * (config.round_cap + 2));

  double reason_total = 0.0;
  bool saw_budget = false, saw_threshold = false;
  for (const auto& [reason, fraction] : report.stop_reason_fractions) {
    reason_total += fraction;
    if (reason == "budget_exhausted") {
      saw_budget = true;
      CHECK(fraction == doctest::Approx(0.5));
    }
    if (reason == "threshold") saw_threshold = true;
  }
  CHECK(saw_budget);
  CHECK(saw_threshold);
  CHECK(reason_total == doctest::Approx(1.0));

  double histogram_total = 0.0;
  for (double v : report.slow_update_histogram) histogram_total += v;
  CHECK(histogram_total == doctest::Approx(1.0));

  REQUIRE(report.m_series_mean.size() == static_cast<size_t>(config.round_cap));
  // scripted judge defaults every contribution to 0.5, so every round mean is 0.5
  for (double m : report.m_series_mean) CHECK(m == doctest::Approx(0.5));
  CHECK(report.delta_m_mean == doctest::Approx(0.0));

  CHECK_FALSE(report.avg_nodes_per_generation.empty());
  CHECK(report.avg_nodes_per_generation[0] == doctest::Approx(3.0));
  CHECK(report.avg_edges_per_generation[0] == doctest::Approx(3.0));
}

TEST_CASE("corrupt lines are counted and skipped") {
  TraceDir tmp;
  RunConfig config = small_config();
  write_trace(tmp.dir / "good.jsonl", config, 0.0);
  {
    std::ofstream out(tmp.dir / "good.jsonl", std::ios::app);
    out << "{ this is not json\n";
    out << "{\"no_type\": 1}\n";
  }
  AnalysisReport report = analyze({(tmp.dir / "good.jsonl").string()});
  CHECK(report.lines_skipped == 2);
  CHECK(report.lines_consumed == config.round_cap + 2);
}

TEST_CASE("analyze requires at least one valid header") {
  TraceDir tmp;
  {
    std::ofstream out(tmp.dir / "headerless.jsonl");
    out << R"({"type":"round"})" << "\n";
  }
  CHECK_THROWS(analyze({(tmp.dir / "headerless.jsonl").string()}));
  CHECK_THROWS_AS(analyze({}), std::invalid_argument);
}

TEST_CASE("the m-series CSV is plot-ready") {
  TraceDir tmp;
  RunConfig config = small_config();
  write_trace(tmp.dir / "a.jsonl", config, 0.0);
  AnalysisReport report = analyze({(tmp.dir / "a.jsonl").string()});
  std::string csv = report.m_series_csv();
  CHECK(csv.rfind("round,m_mean,m_stderr\n", 0) == 0);
  size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == report.m_series_mean.size() + 1);
}

TEST_CASE("the report serializes to JSON") {
  TraceDir tmp;
  write_trace(tmp.dir / "a.jsonl", small_config(), 0.0);
  AnalysisReport report = analyze({(tmp.dir / "a.jsonl").string()});
  nlohmann::json j = report.to_json();
  CHECK(j.at("format_version") == 1);
  CHECK(j.at("files") == 1);
  CHECK(j.contains("slow_update_histogram"));
  CHECK(j.contains("delta_m_positive_fraction"));
}
