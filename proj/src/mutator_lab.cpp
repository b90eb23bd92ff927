#include "coevo/mutator_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coevo {

std::vector<StructuralDelta> enumerate_single_edits(
    const AgentGraph& graph, const FitnessLandscape& landscape) {
  std::vector<StructuralDelta> candidates;
  EditBudget single{1, 1};
  auto keep_if_legal = [&](StructuralDelta delta) {
    ValidationReport report = validate_delta(graph, delta, single);
    if (report.clean()) candidates.push_back(std::move(delta));
  };

  for (const auto& role : landscape.role_pool) {
    StructuralDelta birth;
    birth.birth_death_pairs.push_back({std::nullopt, NodeSpec{role, "", {}}});
    keep_if_legal(std::move(birth));
  }
  for (const auto& [id, _] : graph.nodes) {
    if (id == graph.sink) continue;
    StructuralDelta death;
    death.birth_death_pairs.push_back({id, std::nullopt});
    keep_if_legal(std::move(death));
  }
  for (const auto& [from, fn] : graph.nodes) {
    for (const auto& [to, tn] : graph.nodes) {
      if (from == to || graph.has_edge(from, to)) continue;
      StructuralDelta add;
      add.edge_edits.push_back({EdgeOp::Add, from, to});
      keep_if_legal(std::move(add));
    }
  }
  for (const auto& [from, to] : graph.edges) {
    StructuralDelta remove;
    remove.edge_edits.push_back({EdgeOp::Remove, from, to});
    candidates.push_back(std::move(remove));
  }
  return candidates;
}

MutationProposal biased_mutation_oracle(const AgentGraph& graph,
                                        const FitnessLandscape& landscape,
                                        double p, std::mt19937_64& rng) {
  if (!(p > 0.5) || !(p <= 1.0))
    throw std::invalid_argument("biased_mutation_oracle: p must be in (0.5, 1]");

  int d = distance_to_optima(graph, landscape);
  MutationProposal proposal;
  if (d == 0) return proposal;  // already optimal, empty delta

  std::vector<StructuralDelta> legal = enumerate_single_edits(graph, landscape);
  std::vector<StructuralDelta> improving;
  for (const auto& delta : legal) {
    AgentGraph next = apply_delta(graph, delta);
    if (distance_to_optima(next, landscape) < d) improving.push_back(delta);
  }

  if (improving.empty()) proposal.exhausted = true;

  std::bernoulli_distribution take_improving(p);
  bool biased = !improving.empty() && take_improving(rng);
  const std::vector<StructuralDelta>& pool = biased ? improving : legal;
  if (pool.empty()) return proposal;  // no legal edit at all

  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  proposal.delta = pool[pick(rng)];
  proposal.improving = biased;
  return proposal;
}

AgentGraph perturbed_start(const FitnessLandscape& landscape, int target_distance,
                           std::mt19937_64& rng) {
  if (landscape.optima.empty())
    throw std::invalid_argument("perturbed_start: landscape has no optima");
  AgentGraph graph = landscape.optima.front().topology;
  int guard = 0;
  while (distance_to_optima(graph, landscape) < target_distance) {
    if (++guard > 200)
      throw std::runtime_error("perturbed_start: cannot reach target distance");
    int d = distance_to_optima(graph, landscape);
    std::vector<StructuralDelta> legal = enumerate_single_edits(graph, landscape);
    std::vector<StructuralDelta> worsening;
    for (const auto& delta : legal) {
      AgentGraph next = apply_delta(graph, delta);
      if (distance_to_optima(next, landscape) == d + 1) worsening.push_back(delta);
    }
    if (worsening.empty())
      throw std::runtime_error("perturbed_start: no distance-increasing edit");
    std::uniform_int_distribution<size_t> pick(0, worsening.size() - 1);
    graph = apply_delta(graph, worsening[pick(rng)]);
  }
  return graph;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

ContractionReport run_contraction_experiment(const FitnessLandscape& landscape,
                                             const ContractionConfig& config) {
  if (!(config.p > 0.5))
    throw std::invalid_argument("run_contraction_experiment: p must exceed 0.5");
  std::mt19937_64 rng(config.seed);
  AgentGraph graph = perturbed_start(landscape, config.start_distance, rng);

  ContractionReport report;
  report.lyapunov_values.push_back(lyapunov(graph, landscape, config.eta));

  for (int cycle = 0; cycle < config.cycles; ++cycle) {
    // Fast phase: K replicator steps under noisy contribution scores.
    for (int k = 0; k < config.slow_interval; ++k) {
      std::map<std::string, double> weights;
      for (const auto& [id, node] : graph.nodes)
        weights[id] = node.capability_weight;
      SimplexVector pi = to_frequencies(weights);
      FitnessVector scores = noisy_scores(landscape, pi, graph, rng);
      SimplexVector next = replicator_step(pi, scores, config.eta);
      for (size_t i = 0; i < next.ids.size(); ++i)
        graph.nodes[next.ids[i]].capability_weight =
            std::max(next.values[i], 1e-12);
    }
    // Slow phase: one oracle mutation.
    MutationProposal proposal =
        biased_mutation_oracle(graph, landscape, config.p, rng);
    graph = apply_delta(graph, proposal.delta);
    report.lyapunov_values.push_back(lyapunov(graph, landscape, config.eta));
  }

  const std::vector<double>& L = report.lyapunov_values;
  size_t tail = std::max<size_t>(1, L.size() / 5);
  double floor = 0.0;
  for (size_t i = L.size() - tail; i < L.size(); ++i) floor += L[i];
  floor /= static_cast<double>(tail);
  report.noise_floor = floor;

  std::vector<double> xs, ys;
  for (size_t i = 0; i < L.size(); ++i) {
    double excess = L[i] - floor;
    if (excess > 1e-9) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log(excess));
    }
  }
  double slope = ols_slope(xs, ys);
  report.gamma_hat = 1.0 - std::exp(slope);

  double threshold = config.eta * landscape.noise_bound;
  for (size_t i = 0; i < L.size(); ++i) {
    if (L[i] <= threshold) {
      report.cycles_to_threshold = static_cast<int>(i);
      break;
    }
  }
  report.diverged = L.back() > 4.0 * L.front() + 1.0;
  return report;
}

RandomWalkStats run_random_walk_experiment(const FitnessLandscape& landscape,
                                           double p, int trials, int max_start,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> start(0, max_start);
  std::map<int, std::pair<int, double>> sums;  // level -> (count, sum of d')
  for (int trial = 0; trial < trials; ++trial) {
    int d0 = start(rng);
    AgentGraph graph = perturbed_start(landscape, d0, rng);
    int d = distance_to_optima(graph, landscape);
    MutationProposal proposal = biased_mutation_oracle(graph, landscape, p, rng);
    AgentGraph next = apply_delta(graph, proposal.delta);
    int d_next = distance_to_optima(next, landscape);
    auto& [count, sum] = sums[d];
    count += 1;
    sum += d_next;
  }
  RandomWalkStats stats;
  for (const auto& [level, cs] : sums)
    stats.levels[level] = {cs.first, cs.second / cs.first};
  return stats;
}

}  // namespace coevo
