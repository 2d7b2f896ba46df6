#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cagekit/cspace.hpp"
#include "cagekit/energy.hpp"
#include "cagekit/world.hpp"

namespace cagekit::planners {

using cspace::Configuration;
using cspace::SpaceDescriptor;

struct PlanningProblem {
  const world::Scene* scene = nullptr;
  energy::EnergyModel model;

  static PlanningProblem from_scene(const world::Scene& scene);
};

struct PlannerParams {
  double steer_step = 0.1;    // metric truncation of each extension
  double goal_bias = 0.05;
  int max_nodes = 100000;
  double time_budget = 1.0;   // seconds
  double gamma_rrt = 1.5;     // rewiring radius scale
  double eta_radius = 0.3;    // rewiring radius cap
  double gamma = 0.0;         // weight of path length in the hybrid cost
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  Configuration config;
  double energy = 0.0;       // potential at config
  int parent = -1;
  double edge_length = 0.0;  // metric distance to parent
  double cost_energy = 0.0;  // running max of (energy - e_init) along the branch
  double cost_length = 0.0;  // metric length of the branch
};

struct SearchTree {
  std::vector<TreeNode> nodes;
};

// max{c_parent, e_child - e_init}: the branch cost after appending a vertex.
double combine_energy_cost(double c_parent, double e_child, double e_init);

double hybrid_cost(double cost_energy, double cost_length, double gamma);

// min{gamma_rrt * (ln n / n)^(1/d), eta_radius}.
double rewire_radius(int n_vertices, const SpaceDescriptor& space, const PlannerParams& params);

struct RrtResult {
  std::optional<energy::PathCandidate> path;
  double elapsed_s = 0.0;
  int nodes = 0;
};

// Goal-seeking RRT restricted to configurations with energy at most
// e_init + e_sublevel. Returns the first goal-reaching path, or nothing once
// the node or time budget runs out.
RrtResult rrt_search(const PlanningProblem& problem, double e_sublevel,
                     const PlannerParams& params);

struct Improvement {
  double time_s = 0.0;
  double cost_energy = 0.0;
  double cost_length = 0.0;
  double hybrid = 0.0;
  energy::PathCandidate path;
};

struct OptimalResult {
  std::vector<Improvement> improvements;
  SearchTree tree;
  double elapsed_s = 0.0;
};

// Anytime asymptotically optimal search: extensions choose the parent of
// minimum hybrid cost within the shrinking rewire radius, then rewire
// neighbors (strict improvements only) with costs propagated through the
// affected subtrees. Emits an improvement whenever the best goal-reaching
// hybrid cost strictly drops; a callback returning false stops the search.
OptimalResult optimal_search(const PlanningProblem& problem, const PlannerParams& params,
                             const std::function<bool(const Improvement&)>& on_improvement = {});

}  // namespace cagekit::planners
