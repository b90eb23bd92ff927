#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coevo/analysis.hpp"
#include "coevo/backends.hpp"
#include "coevo/http_backend.hpp"
#include "coevo/landscape.hpp"
#include "coevo/mutator_lab.hpp"
#include "coevo/orchestrator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

coevo::Rubric rubric_from_json(const json& items) {
  coevo::Rubric rubric;
  for (const auto& item : items) {
    coevo::RubricItem r;
    std::string op = item.value("operator", "correctness");
    r.op = (op == "contradiction") ? coevo::RubricOp::Contradiction
                                   : coevo::RubricOp::Correctness;
    r.text = item.value("criterion", "");
    rubric.push_back(std::move(r));
  }
  return rubric;
}

struct BackendBundle {
  std::unique_ptr<coevo::AgentBackend> agent;
  std::unique_ptr<coevo::JudgeBackend> judge;
  std::unique_ptr<coevo::MetaBackend> meta;
  std::unique_ptr<coevo::HttpChatBackend> http;

  coevo::Backends view() {
    if (http) return {http.get(), http.get(), http.get()};
    return {agent.get(), judge.get(), meta.get()};
  }
};

BackendBundle build_backends(const json& spec, std::uint64_t seed) {
  BackendBundle bundle;
  std::string type = spec.value("type", "mock");
  if (type == "http") {
    coevo::HttpConfig config = coevo::HttpConfig::from_env();
    if (spec.contains("base_url")) config.base_url = spec.at("base_url");
    if (spec.contains("model")) config.model = spec.at("model");
    if (spec.contains("temperature")) config.temperature = spec.at("temperature");
    bundle.http = std::make_unique<coevo::HttpChatBackend>(config);
    return bundle;
  }
  if (type == "mock") {
    coevo::FitnessLandscape landscape = coevo::make_landscape(
        spec.value("landscape", "standard"), spec.value("epsilon", 0.0));
    bundle.agent = std::make_unique<coevo::LandscapeAgentBackend>();
    bundle.judge =
        std::make_unique<coevo::LandscapeJudgeBackend>(landscape, seed);
    bundle.meta = std::make_unique<coevo::OracleMetaBackend>(
        landscape, spec.value("p", 0.8), seed + 1);
    return bundle;
  }
  throw std::runtime_error("unknown backend type: " + type);
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            std::uint64_t seed_override, bool seed_set) {
  json config_json = load_json_file(config_path);
  coevo::RunConfig config =
      coevo::run_config_from_json(config_json.value("run", json::object()));
  if (seed_set) config.seed = seed_override;
  if (config_json.contains("rubric"))
    config.rubric = rubric_from_json(config_json.at("rubric"));
  config.validate();

  std::vector<std::string> queries;
  if (config_json.contains("queries"))
    queries = config_json.at("queries").get<std::vector<std::string>>();
  else
    queries.push_back(config_json.value("query", "demo query"));

  fs::path out(out_path.empty() ? "traces" : out_path);
  bool single_file = queries.size() == 1 && out.extension() == ".jsonl";
  if (!single_file) fs::create_directories(out);

  for (size_t qi = 0; qi < queries.size(); ++qi) {
    fs::path trace_path =
        single_file ? out : out / ("trace_" + std::to_string(qi) + ".jsonl");
    std::ofstream trace(trace_path);
    if (!trace) throw std::runtime_error("cannot write " + trace_path.string());

    BackendBundle backends = build_backends(
        config_json.value("backend", json{{"type", "mock"}}), config.seed + qi);

    coevo::AgentGraph initial =
        coevo::init_graph(config.roles, config.sink_role, config.node_cap);
    trace << coevo::trace_header_json(config, initial, queries[qi]).dump() << "\n";

    try {
      coevo::InstanceResult result = coevo::run_instance(
          queries[qi], config, backends.view(),
          [&](const coevo::RoundTrace& rt) {
            trace << coevo::round_trace_to_json(rt).dump() << "\n";
            trace.flush();
          });
      trace << coevo::instance_result_json(result).dump() << "\n";
      std::cout << "query " << qi << ": stop_reason="
                << coevo::stop_reason_name(result.stop_reason)
                << " rounds=" << result.rounds_used
                << " slow_updates=" << result.slow_updates_used
                << " final_score=" << result.traces.back().answer_score << "\n";
    } catch (const std::exception& e) {
      std::cerr << "query " << qi << " failed: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_lab(const std::string& config_path, const std::string& out_dir) {
  json config_json = load_json_file(config_path);
  double p = config_json.value("p", 0.8);
  if (!(p > 0.5) || !(p <= 1.0))
    throw std::runtime_error("lab config: p must be in (0.5, 1]");

  coevo::FitnessLandscape landscape = coevo::make_landscape(
      config_json.value("landscape", "standard"), config_json.value("epsilon", 0.05));

  coevo::ContractionConfig cc;
  cc.p = p;
  cc.eta = config_json.value("eta", 0.5);
  cc.slow_interval = config_json.value("slow_interval", 2);
  cc.cycles = config_json.value("cycles", 100);
  cc.start_distance = config_json.value("start_distance", 3);

  std::vector<std::uint64_t> seeds;
  if (config_json.contains("seeds") && config_json.at("seeds").is_array()) {
    seeds = config_json.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    int count = config_json.value("seed_count", 10);
    std::uint64_t base = config_json.value("seed_base", 1);
    for (int i = 0; i < count; ++i) seeds.push_back(base + i);
  }

  fs::path out(out_dir.empty() ? "lab_out" : out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "lyapunov.csv");
  csv << "seed,cycle,lyapunov\n";

  json reports = json::array();
  for (std::uint64_t seed : seeds) {
    cc.seed = seed;
    coevo::ContractionReport report =
        coevo::run_contraction_experiment(landscape, cc);
    for (size_t i = 0; i < report.lyapunov_values.size(); ++i)
      csv << seed << "," << i << "," << report.lyapunov_values[i] << "\n";
    reports.push_back({{"seed", seed},
                       {"gamma_hat", report.gamma_hat},
                       {"noise_floor", report.noise_floor},
                       {"cycles_to_threshold", report.cycles_to_threshold},
                       {"diverged", report.diverged}});
  }
  json summary = {{"format_version", 1},
                  {"landscape", landscape.id},
                  {"p", p},
                  {"eta", cc.eta},
                  {"slow_interval", cc.slow_interval},
                  {"cycles", cc.cycles},
                  {"start_distance", cc.start_distance},
                  {"runs", reports}};
  std::ofstream report_file(out / "report.json");
  report_file << summary.dump(2) << "\n";
  std::cout << "lab: wrote " << (out / "report.json").string() << " and "
            << (out / "lyapunov.csv").string() << "\n";
  return 0;
}

int cmd_analyze(std::vector<std::string> files, const std::string& trace_dir,
                const std::string& out_path) {
  if (!trace_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(trace_dir))
      if (entry.path().extension() == ".jsonl")
        files.push_back(entry.path().string());
  }
  coevo::AnalysisReport report = coevo::analyze(files);
  std::string rendered = report.to_json().dump(2);
  if (out_path.empty()) {
    std::cout << rendered << "\n";
  } else {
    std::ofstream out(out_path);
    out << rendered << "\n";
    fs::path csv_path = fs::path(out_path).replace_extension(".csv");
    std::ofstream csv(csv_path);
    csv << report.m_series_csv();
    std::cout << "analyze: wrote " << out_path << " and " << csv_path.string()
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coevo: two-timescale multi-agent co-evolution engine"};
  app.require_subcommand(1);

  std::string config_path, out_path, trace_dir;
  std::vector<std::string> trace_files;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "run task instances and persist traces");
  run->add_option("--config", config_path, "run config JSON")->required();
  run->add_option("--out", out_path, "trace output file (.jsonl) or directory");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* lab = app.add_subcommand("lab", "run dynamics-lab contraction experiments");
  lab->add_option("--config", config_path, "lab config JSON")->required();
  lab->add_option("--out", out_path, "output directory");

  auto* analyze = app.add_subcommand("analyze", "aggregate persisted traces");
  analyze->add_option("files", trace_files, "trace JSONL files");
  analyze->add_option("--trace-dir", trace_dir, "directory of trace files");
  analyze->add_option("--out", out_path, "report JSON path (CSV written alongside)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, seed, seed_set);
    if (lab->parsed()) return cmd_lab(config_path, out_path);
    if (analyze->parsed()) return cmd_analyze(trace_files, trace_dir, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
