#include "coevo/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace coevo {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Enumerates the simplex grid with N subdivisions over `n` coordinates and
// keeps the best mean fitness seen.
double grid_search_ceiling(const AgentGraph& graph,
                           const FitnessLandscape& landscape, int n, int N) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : graph.nodes) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  SimplexVector pi;
  pi.ids = ids;
  pi.values.assign(ids.size(), 0.0);

  double best = 0.0;
  std::vector<int> counts(static_cast<size_t>(n), 0);
  // Recursive composition enumeration: counts sum to N.
  std::function<void(int, int)> recurse = [&](int idx, int remaining) {
    if (idx == n - 1) {
      counts[static_cast<size_t>(idx)] = remaining;
      for (int i = 0; i < n; ++i)
        pi.values[static_cast<size_t>(i)] =
            static_cast<double>(counts[static_cast<size_t>(i)]) / N;
      best = std::max(best, mean_fitness(pi, landscape.eval(pi, graph)));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<size_t>(idx)] = c;
      recurse(idx + 1, remaining - c);
    }
  };
  recurse(0, N);
  return best;
}

SimplexVector uniform_simplex(const AgentGraph& graph) {
  std::map<std::string, double> w;
  for (const auto& [id, _] : graph.nodes) w[id] = 1.0;
  return to_frequencies(w);
}

}  // namespace

int distance_to_optima(const AgentGraph& graph, const FitnessLandscape& landscape) {
  if (landscape.optima.empty())
    throw std::invalid_argument("distance_to_optima: landscape has no optima");
  int best = topology_distance(graph, landscape.optima.front().topology);
  for (size_t i = 1; i < landscape.optima.size(); ++i)
    best = std::min(best, topology_distance(graph, landscape.optima[i].topology));
  return best;
}

double fitness_ceiling(const AgentGraph& graph, const FitnessLandscape& landscape) {
  if (graph.nodes.empty())
    throw std::invalid_argument("fitness_ceiling: empty graph");
  int n = static_cast<int>(graph.nodes.size());
  if (landscape.pi_independent) {
    FitnessVector f = landscape.eval(uniform_simplex(graph), graph);
    return *std::max_element(f.values.begin(), f.values.end());
  }
  if (n > 6)
    throw std::invalid_argument("fitness_ceiling: too many active agents (>6)");
  if (n == 1) {
    SimplexVector pi = uniform_simplex(graph);
    return mean_fitness(pi, landscape.eval(pi, graph));
  }
  int N = (n <= 4) ? 100 : 20;  // resolution 0.01 up to 4 agents, 0.05 above
  return grid_search_ceiling(graph, landscape, n, N);
}

double lyapunov(const AgentGraph& graph, const FitnessLandscape& landscape,
                double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("lyapunov: eta <= 0");
  std::map<std::string, double> weights;
  for (const auto& [id, node] : graph.nodes) weights[id] = node.capability_weight;
  SimplexVector pi = to_frequencies(weights);
  double gap = fitness_ceiling(graph, landscape) -
               mean_fitness(pi, landscape.eval(pi, graph));
  return distance_to_optima(graph, landscape) + eta * std::max(gap, 0.0);
}

FitnessVector noisy_scores(const FitnessLandscape& landscape,
                           const SimplexVector& pi, const AgentGraph& graph,
                           std::mt19937_64& rng) {
  FitnessVector f = landscape.eval(pi, graph);
  if (landscape.noise_bound > 0.0) {
    std::uniform_real_distribution<double> noise(-landscape.noise_bound,
                                                 landscape.noise_bound);
    for (double& v : f.values) v = clamp01(v + noise(rng));
  }
  return f;
}

FitnessLandscape make_standard_landscape(double epsilon) {
  FitnessLandscape ls;
  ls.id = "standard";
  ls.role_pool = {"planner", "searcher", "calculator",
                  "verifier", "reflector", "researcher"};
  ls.noise_bound = epsilon;
  ls.pi_independent = true;

  AgentGraph target;
  target.sink = "reflector";
  for (const auto& role : {"planner", "searcher", "verifier", "reflector"})
    target.nodes[role] = AgentNode{role, role, 1.0, {}, 0};
  target.edges = {{"planner", "searcher"},
                  {"searcher", "verifier"},
                  {"verifier", "reflector"},
                  {"planner", "reflector"}};

  std::map<std::string, double> base = {
      {"planner", 0.3},   {"searcher", 0.5},  {"calculator", 0.2},
      {"verifier", 0.6},  {"reflector", 0.9}, {"researcher", 0.4}};

  AgentGraph target_copy = target;
  ls.fitness = [base, target_copy](const SimplexVector& pi,
                                   const AgentGraph& graph) {
    (void)pi;
    int d = topology_distance(graph, target_copy);
    FitnessVector f;
    for (const auto& [id, node] : graph.nodes) {
      auto it = base.find(node.role);
      double b = (it == base.end()) ? 0.1 : it->second;
      f.ids.push_back(id);
      f.values.push_back(clamp01(b - 0.1 * d));
    }
    return f;
  };

  SimplexVector pi_star;
  for (const auto& [id, _] : target.nodes) {
    pi_star.ids.push_back(id);
    pi_star.values.push_back(id == "reflector" ? 1.0 : 0.0);
  }
  ls.optima.push_back({target, pi_star});
  return ls;
}

FitnessLandscape make_quadratic_landscape(const std::vector<double>& pi_star,
                                          double peak) {
  if (pi_star.empty())
    throw std::invalid_argument("make_quadratic_landscape: empty pi_star");
  FitnessLandscape ls;
  ls.id = "quadratic";
  ls.pi_independent = false;

  int n = static_cast<int>(pi_star.size());
  std::vector<std::string> roles;
  for (int i = 1; i <= n; ++i) roles.push_back("r" + std::to_string(i));
  ls.role_pool = roles;
  AgentGraph topo = init_graph(roles, roles.back());

  std::vector<double> star = pi_star;
  ls.fitness = [star, peak](const SimplexVector& pi, const AgentGraph& graph) {
    double dist2 = 0.0;
    for (size_t i = 0; i < pi.values.size(); ++i) {
      double d = pi.values[i] - (i < star.size() ? star[i] : 0.0);
      dist2 += d * d;
    }
    FitnessVector f;
    for (const auto& [id, _] : graph.nodes) {
      f.ids.push_back(id);
      f.values.push_back(clamp01(peak - dist2));
    }
    return f;
  };

  SimplexVector ps;
  ps.ids.assign(roles.begin(), roles.end());
  std::sort(ps.ids.begin(), ps.ids.end());
  ps.values = star;  // role names r1..rn sort in index order for n <= 9
  ls.optima.push_back({topo, ps});
  return ls;
}

FitnessLandscape make_landscape(const std::string& id, double epsilon) {
  if (id == "standard") return make_standard_landscape(epsilon);
  if (id == "quadratic") {
    FitnessLandscape ls = make_quadratic_landscape({0.5, 0.3, 0.2});
    ls.noise_bound = epsilon;
    return ls;
  }
  throw std::invalid_argument("unknown landscape id: " + id);
}

}  // namespace coevo
