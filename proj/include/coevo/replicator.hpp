#pragma once

#include <map>
#include <string>
#include <vector>

namespace coevo {

/// A nonnegative distribution over agent ids, summing to 1.
struct SimplexVector {
  std::vector<std::string> ids;  // sorted, unique
  std::vector<double> values;

  double at(const std::string& id) const;
  bool same_index(const SimplexVector& other) const { return ids == other.ids; }
};

/// Per-agent fitness (or judged contribution) values in [0,1].
struct FitnessVector {
  std::vector<std::string> ids;  // sorted, unique
  std::vector<double> values;
  double noise_bound = 0.0;

  double at(const std::string& id) const;
  static FitnessVector from_map(const std::map<std::string, double>& m);
};

SimplexVector simplex_from_map(const std::map<std::string, double>& m);

/// pi_v = w_v / sum(w). Throws on an empty map or nonpositive weight.
SimplexVector to_frequencies(const std::map<std::string, double>& weights);

/// Discrete replicator update pi'_v ∝ pi_v exp(eta * c_v). The exponent is
/// shifted by max(c) before exponentiation, so adding a constant to all
/// scores leaves the computation unchanged up to rounding.
SimplexVector replicator_step(const SimplexVector& pi, const FitnessVector& scores,
                              double eta);

/// sum_v pi_v f_v
double mean_fitness(const SimplexVector& pi, const FitnessVector& f);

/// sum_v pi_v (f_v - mean)^2
double fitness_variance(const SimplexVector& pi, const FitnessVector& f);

/// Forward-Euler trajectory of the replicator flow d pi_v/dt = pi_v (f_v - mean),
/// renormalized each step. Returns steps+1 states starting at pi0.
/// Throws if dt * max|f_v - mean| >= 1 at the initial state.
std::vector<SimplexVector> integrate_flow(const SimplexVector& pi0,
                                          const FitnessVector& f, double dt,
                                          int steps);

/// mean(pi_next, f) - mean(pi, f) - eta * variance(pi, f): the residual of
/// the one-step fitness-ascent bound, O(eta^2) for noiseless fitness.
double ascent_gap(const SimplexVector& pi, const SimplexVector& pi_next,
                  const FitnessVector& f, double eta);

}  // namespace coevo
