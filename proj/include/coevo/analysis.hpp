#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coevo {

/// Aggregated diagnostics over a set of persisted run traces.
struct AnalysisReport {
  int format_version = 1;
  int files = 0;
  int lines_consumed = 0;
  int lines_skipped = 0;

  // Slow-update count histogram: bins 0..max_bins-1 plus one overflow bin.
  std::vector<double> slow_update_histogram;  // fractions, sums to 1
  int histogram_overflow_bin = 0;

  // stop reason -> fraction of instances
  std::vector<std::pair<std::string, double>> stop_reason_fractions;

  // Per-slow-step average graph size: index = number of slow updates applied
  // so far (graph generation), value = mean node / edge count over rounds
  // observed at that generation.
  std::vector<double> avg_nodes_per_generation;
  std::vector<double> avg_edges_per_generation;

  // Round-increment statistics over team-mean contribution.
  double delta_m_mean = 0.0;
  double delta_m_positive_fraction = 0.0;
  std::vector<double> m_series_mean;    // per round, averaged over instances
  std::vector<double> m_series_stderr;  // standard error per round

  nlohmann::json to_json() const;
  std::string m_series_csv() const;  // plot-ready: round,mean,stderr
};

/// Parses JSONL trace files (sorted by filename for determinism) into the
/// aggregate report. Corrupt lines are skipped and counted. Throws when no
/// file yields a valid header.
AnalysisReport analyze(const std::vector<std::string>& trace_paths);

}  // namespace coevo
