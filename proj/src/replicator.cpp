#include "coevo/replicator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coevo {

namespace {

void require_same_index(const SimplexVector& pi, const FitnessVector& f,
                        const char* where) {
  if (pi.ids != f.ids)
    throw std::invalid_argument(std::string(where) + ": index mismatch");
}

}  // namespace

double SimplexVector::at(const std::string& id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id)
    throw std::out_of_range("SimplexVector: unknown id " + id);
  return values[static_cast<size_t>(it - ids.begin())];
}

double FitnessVector::at(const std::string& id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id)
    throw std::out_of_range("FitnessVector: unknown id " + id);
  return values[static_cast<size_t>(it - ids.begin())];
}

FitnessVector FitnessVector::from_map(const std::map<std::string, double>& m) {
  FitnessVector f;
  for (const auto& [id, v] : m) {
    f.ids.push_back(id);
    f.values.push_back(v);
  }
  return f;
}

SimplexVector simplex_from_map(const std::map<std::string, double>& m) {
  SimplexVector s;
  for (const auto& [id, v] : m) {
    s.ids.push_back(id);
    s.values.push_back(v);
  }
  return s;
}

SimplexVector to_frequencies(const std::map<std::string, double>& weights) {
  if (weights.empty()) throw std::invalid_argument("to_frequencies: empty map");
  double total = 0.0;
  for (const auto& [id, w] : weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("to_frequencies: nonpositive weight for " + id);
    total += w;
  }
  SimplexVector pi;
  for (const auto& [id, w] : weights) {
    pi.ids.push_back(id);
    pi.values.push_back(w / total);
  }
  return pi;
}

SimplexVector replicator_step(const SimplexVector& pi, const FitnessVector& scores,
                              double eta) {
  require_same_index(pi, scores, "replicator_step");
  if (!(eta > 0.0)) throw std::invalid_argument("replicator_step: eta <= 0");

  double shift = *std::max_element(scores.values.begin(), scores.values.end());
  SimplexVector out;
  out.ids = pi.ids;
  out.values.resize(pi.values.size());
  double total = 0.0;
  for (size_t i = 0; i < pi.values.size(); ++i) {
    out.values[i] = pi.values[i] * std::exp(eta * (scores.values[i] - shift));
    total += out.values[i];
  }
  for (double& v : out.values) v /= total;
  return out;
}

double mean_fitness(const SimplexVector& pi, const FitnessVector& f) {
  require_same_index(pi, f, "mean_fitness");
  double mean = 0.0;
  for (size_t i = 0; i < pi.values.size(); ++i) mean += pi.values[i] * f.values[i];
  return mean;
}

double fitness_variance(const SimplexVector& pi, const FitnessVector& f) {
  require_same_index(pi, f, "fitness_variance");
  double mean = mean_fitness(pi, f);
  double var = 0.0;
  for (size_t i = 0; i < pi.values.size(); ++i) {
    double d = f.values[i] - mean;
    var += pi.values[i] * d * d;
  }
  return var;
}

std::vector<SimplexVector> integrate_flow(const SimplexVector& pi0,
                                          const FitnessVector& f, double dt,
                                          int steps) {
  require_same_index(pi0, f, "integrate_flow");
  if (!(dt > 0.0) || steps <= 0)
    throw std::invalid_argument("integrate_flow: dt and steps must be positive");
  double mean0 = mean_fitness(pi0, f);
  double spread = 0.0;
  for (double fv : f.values) spread = std::max(spread, std::abs(fv - mean0));
  if (dt * spread >= 1.0)
    throw std::invalid_argument("integrate_flow: dt too large for stability");

  std::vector<SimplexVector> trajectory;
  trajectory.reserve(static_cast<size_t>(steps) + 1);
  trajectory.push_back(pi0);
  SimplexVector pi = pi0;
  for (int s = 0; s < steps; ++s) {
    double mean = mean_fitness(pi, f);
    double total = 0.0;
    for (size_t i = 0; i < pi.values.size(); ++i) {
      pi.values[i] += dt * pi.values[i] * (f.values[i] - mean);
      pi.values[i] = std::max(pi.values[i], 0.0);
      total += pi.values[i];
    }
    for (double& v : pi.values) v /= total;
    trajectory.push_back(pi);
  }
  return trajectory;
}

double ascent_gap(const SimplexVector& pi, const SimplexVector& pi_next,
                  const FitnessVector& f, double eta) {
  if (pi.ids != pi_next.ids)
    throw std::invalid_argument("ascent_gap: index mismatch");
  return mean_fitness(pi_next, f) - mean_fitness(pi, f) -
         eta * fitness_variance(pi, f);
}

}  // namespace coevo
