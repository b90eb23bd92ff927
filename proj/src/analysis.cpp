#include "coevo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace coevo {

using nlohmann::json;

namespace {

struct InstanceAccumulator {
  std::vector<double> m_series;
  std::string stop_reason;
  int slow_updates = -1;
  std::map<int, std::pair<long, long>> size_by_generation;  // gen -> (sum n, sum e)
  std::map<int, int> rounds_by_generation;
};

}  // namespace

AnalysisReport analyze(const std::vector<std::string>& trace_paths) {
  if (trace_paths.empty()) throw std::invalid_argument("analyze: no trace files");
  std::vector<std::string> paths = trace_paths;
  std::sort(paths.begin(), paths.end());

  AnalysisReport report;
  int round_cap = 10, slow_interval = 2;
  bool saw_header = false;

  std::vector<InstanceAccumulator> instances;
  std::map<int, std::pair<long, long>> size_sums;  // gen -> (sum nodes, sum edges)
  std::map<int, int> size_counts;

  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "analyze: cannot open " << path << ", skipping\n";
      continue;
    }
    report.files++;
    InstanceAccumulator acc;
    bool any = false;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
        report.lines_skipped++;
        std::cerr << "analyze: skipping corrupt line in " << path << "\n";
        continue;
      }
      try {
        std::string type = j.at("type").get<std::string>();
        if (type == "header") {
          round_cap = j.at("config").value("round_cap", round_cap);
          slow_interval = j.at("config").value("slow_interval", slow_interval);
          saw_header = true;
        } else if (type == "round") {
          acc.m_series.push_back(j.at("team_mean").get<double>());
          int gen = j.at("graph_generation").get<int>();
          int nodes = static_cast<int>(j.at("agents").size());
          int edges = j.value("edge_count", 0);
          size_sums[gen].first += nodes;
          size_sums[gen].second += edges;
          size_counts[gen]++;
          any = true;
        } else if (type == "result") {
          acc.stop_reason = j.at("stop_reason").get<std::string>();
          acc.slow_updates = j.at("slow_updates_used").get<int>();
        }
        report.lines_consumed++;
      } catch (const json::exception&) {
        report.lines_skipped++;
      }
    }
    if (any || acc.slow_updates >= 0) instances.push_back(std::move(acc));
  }
  if (!saw_header) throw std::runtime_error("analyze: no valid trace header found");

  // Slow-update histogram: bins 0..R/K plus overflow.
  int max_bin = std::max(1, round_cap / std::max(1, slow_interval));
  report.histogram_overflow_bin = max_bin + 1;
  report.slow_update_histogram.assign(static_cast<size_t>(max_bin + 2), 0.0);
  int counted = 0;
  for (const auto& acc : instances) {
    if (acc.slow_updates < 0) continue;
    int bin = std::min(acc.slow_updates, max_bin + 1);
    report.slow_update_histogram[static_cast<size_t>(bin)] += 1.0;
    counted++;
  }
  if (counted > 0)
    for (double& v : report.slow_update_histogram) v /= counted;

  // Stop reasons.
  std::map<std::string, int> reasons;
  int reason_total = 0;
  for (const auto& acc : instances) {
    if (acc.stop_reason.empty()) continue;
    reasons[acc.stop_reason]++;
    reason_total++;
  }
  for (const auto& [reason, count] : reasons)
    report.stop_reason_fractions.push_back(
        {reason, static_cast<double>(count) / std::max(1, reason_total)});

  // Graph size by slow step.
  int max_gen = size_sums.empty() ? -1 : size_sums.rbegin()->first;
  for (int gen = 0; gen <= max_gen; ++gen) {
    auto it = size_counts.find(gen);
    if (it == size_counts.end() || it->second == 0) {
      report.avg_nodes_per_generation.push_back(0.0);
      report.avg_edges_per_generation.push_back(0.0);
      continue;
    }
    report.avg_nodes_per_generation.push_back(
        static_cast<double>(size_sums[gen].first) / it->second);
    report.avg_edges_per_generation.push_back(
        static_cast<double>(size_sums[gen].second) / it->second);
  }

  // Delta-m statistics pooled over instances.
  double delta_sum = 0.0;
  int delta_count = 0, delta_positive = 0;
  size_t longest = 0;
  for (const auto& acc : instances) longest = std::max(longest, acc.m_series.size());
  std::vector<double> sum(longest, 0.0), sumsq(longest, 0.0);
  std::vector<int> count(longest, 0);
  for (const auto& acc : instances) {
    for (size_t r = 0; r < acc.m_series.size(); ++r) {
      sum[r] += acc.m_series[r];
      sumsq[r] += acc.m_series[r] * acc.m_series[r];
      count[r]++;
    }
    for (size_t r = 0; r + 1 < acc.m_series.size(); ++r) {
      double d = acc.m_series[r + 1] - acc.m_series[r];
      delta_sum += d;
      delta_count++;
      if (d > 0.0) delta_positive++;
    }
  }
  if (delta_count > 0) {
    report.delta_m_mean = delta_sum / delta_count;
    report.delta_m_positive_fraction =
        static_cast<double>(delta_positive) / delta_count;
  }
  for (size_t r = 0; r < longest; ++r) {
    double mean = count[r] > 0 ? sum[r] / count[r] : 0.0;
    report.m_series_mean.push_back(mean);
    if (count[r] > 1) {
      double var = (sumsq[r] - count[r] * mean * mean) / (count[r] - 1);
      report.m_series_stderr.push_back(std::sqrt(std::max(var, 0.0) / count[r]));
    } else {
      report.m_series_stderr.push_back(0.0);
    }
  }

  return report;
}

json AnalysisReport::to_json() const {
  json reasons = json::object();
  for (const auto& [reason, fraction] : stop_reason_fractions)
    reasons[reason] = fraction;
  return {{"format_version", format_version},
          {"files", files},
          {"lines_consumed", lines_consumed},
          {"lines_skipped", lines_skipped},
          {"slow_update_histogram", slow_update_histogram},
          {"histogram_overflow_bin", histogram_overflow_bin},
          {"stop_reason_fractions", reasons},
          {"avg_nodes_per_generation", avg_nodes_per_generation},
          {"avg_edges_per_generation", avg_edges_per_generation},
          {"delta_m_mean", delta_m_mean},
          {"delta_m_positive_fraction", delta_m_positive_fraction},
          {"m_series_mean", m_series_mean},
          {"m_series_stderr", m_series_stderr}};
}

std::string AnalysisReport::m_series_csv() const {
  std::ostringstream os;
  os << "round,m_mean,m_stderr\n";
  for (size_t r = 0; r < m_series_mean.size(); ++r)
    os << r << "," << m_series_mean[r] << "," << m_series_stderr[r] << "\n";
  return os.str();
}

}  // namespace coevo
