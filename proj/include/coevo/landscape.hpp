#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coevo/graph.hpp"
#include "coevo/replicator.hpp"

namespace coevo {

/// A synthetic fitness landscape over (frequency, topology) configurations.
/// `optima` lists the locally optimal configurations; `fitness` assigns each
/// living agent an expected contribution in [0,1].
struct FitnessLandscape {
  struct Optimum {
    AgentGraph topology;
    SimplexVector pi_star;
  };

  std::string id;
  std::vector<std::string> role_pool;
  std::function<FitnessVector(const SimplexVector&, const AgentGraph&)> fitness;
  std::vector<Optimum> optima;
  double noise_bound = 0.0;
  // True when f does not depend on pi, so the ceiling is max_v f_v.
  bool pi_independent = true;

  FitnessVector eval(const SimplexVector& pi, const AgentGraph& graph) const {
    return fitness(pi, graph);
  }
};

/// min over optima of topology_distance(graph, T*).
int distance_to_optima(const AgentGraph& graph, const FitnessLandscape& landscape);

/// max_pi mean_fitness(pi, T). Linear landscapes reduce to max_v f_v; otherwise
/// a brute-force simplex grid search (resolution 0.01 up to 4 agents, 0.05 up
/// to 6). Throws for more than 6 active agents.
double fitness_ceiling(const AgentGraph& graph, const FitnessLandscape& landscape);

/// Joint Lyapunov value d(T, A) + eta * (ceiling - mean fitness at the graph's
/// current frequencies). Zero exactly at a listed optimum with optimal
/// frequencies.
double lyapunov(const AgentGraph& graph, const FitnessLandscape& landscape,
                double eta);

/// Draws judged contribution scores: f_v plus uniform noise within the
/// landscape's noise bound, clamped to [0,1].
FitnessVector noisy_scores(const FitnessLandscape& landscape,
                           const SimplexVector& pi, const AgentGraph& graph,
                           std::mt19937_64& rng);

/// The lab's default landscape: a four-role pipeline target topology with
/// linear per-role fitness that degrades with topology distance. `epsilon`
/// sets the contribution-noise bound.
FitnessLandscape make_standard_landscape(double epsilon = 0.0);

/// A pi-dependent landscape with a single interior peak at pi_star on the
/// initial topology: mean fitness = peak - ||pi - pi_star||^2.
FitnessLandscape make_quadratic_landscape(const std::vector<double>& pi_star,
                                          double peak = 0.9);

/// Looks up a landscape by id ("standard", "quadratic"). Throws on unknown id.
FitnessLandscape make_landscape(const std::string& id, double epsilon);

}  // namespace coevo
