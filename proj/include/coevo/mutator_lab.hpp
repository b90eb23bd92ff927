#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "coevo/graph.hpp"
#include "coevo/landscape.hpp"

namespace coevo {

/// Output of the biased mutation oracle: the proposed delta plus flags
/// recording whether the edit was drawn from the distance-decreasing pool
/// (the probability-p branch) and whether no improving edit existed despite
/// d > 0.
struct MutationProposal {
  StructuralDelta delta;
  bool improving = false;
  bool exhausted = false;
};

/// Enumerates every legal single structural edit of the graph: births from
/// the landscape's role pool, deaths of non-sink nodes, and acyclic edge
/// adds/removes. Each candidate validates cleanly against the budget.
std::vector<StructuralDelta> enumerate_single_edits(
    const AgentGraph& graph, const FitnessLandscape& landscape);

/// The synthetic meta-controller: with probability p emits a single edit that
/// strictly decreases the distance to the optimum set (uniform among such
/// edits), otherwise a uniformly random legal edit. Emits an empty delta at
/// distance zero. Requires 0.5 < p <= 1.
MutationProposal biased_mutation_oracle(const AgentGraph& graph,
                                        const FitnessLandscape& landscape,
                                        double p, std::mt19937_64& rng);

/// Builds a start graph at exactly `target_distance` from the landscape's
/// optimum set by applying random distance-increasing single edits to the
/// nearest optimum topology.
AgentGraph perturbed_start(const FitnessLandscape& landscape, int target_distance,
                           std::mt19937_64& rng);

/// Per-cycle record of one contraction run.
struct ContractionReport {
  std::vector<double> lyapunov_values;  // L_0 .. L_cycles, one per slow cycle
  double gamma_hat = 0.0;               // fitted per-cycle contraction factor
  double noise_floor = 0.0;             // mean of the last 20% of cycles
  int cycles_to_threshold = -1;         // first cycle with L <= eta*epsilon
  bool diverged = false;
};

struct ContractionConfig {
  double p = 0.8;
  double eta = 0.5;
  int slow_interval = 2;  // K fast steps per cycle
  int cycles = 100;
  int start_distance = 3;
  std::uint64_t seed = 0;
};

/// Alternates K replicator steps (scores = f + bounded noise) with one oracle
/// mutation, recording the Lyapunov value per cycle and fitting the
/// contraction factor by least squares on log(L - floor).
ContractionReport run_contraction_experiment(const FitnessLandscape& landscape,
                                             const ContractionConfig& config);

/// Mean next-distance per occupied distance level, from independent
/// single-step trials (start distance drawn uniformly in [0, max_start]).
struct RandomWalkStats {
  // level -> (trial count, mean d_{t+1})
  std::map<int, std::pair<int, double>> levels;
};

RandomWalkStats run_random_walk_experiment(const FitnessLandscape& landscape,
                                           double p, int trials, int max_start,
                                           std::uint64_t seed);

/// OLS slope of y against x. Returns 0 for fewer than 2 points.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace coevo
