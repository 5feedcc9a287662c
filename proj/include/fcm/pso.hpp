#pragma once

// Global-best particle swarm baseline. Each particle is a full n x n weight
// matrix; fitness is the free-run mean squared reproduction error of the
// training sequences.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fcm/core.hpp"

namespace fcm {

struct PsoConfig {
  std::size_t population_size = 20;
  int max_iters = 500;
  double accel1 = 2.0;
  double accel2 = 2.0;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
  double min_error_grad = 1e-20;
  int stall_window = 20;      // iterations over which min_error_grad is measured
  double velocity_max = 1.0;  // per-coordinate velocity clamp
  std::uint64_t seed = 0;

  void validate() const;
};

// Fitness: 1/(m n k) sum of squared deviations between the
// observed sequences and free runs of `w` from the stored initial vectors.
double fitness(const WeightMatrix& w, const ResponseSet& rs, const ActivationSpec& spec);

struct PsoResult {
  WeightMatrix weights{1};
  double fitness = 0.0;
  int iterations = 0;
  std::vector<double> history;  // global-best fitness after initialization and after each iteration
  double best_initial_fitness = 0.0;
};

PsoResult pso_learn_detailed(const ResponseSet& rs, const ActivationSpec& spec, const PsoConfig& cfg);
WeightMatrix pso_learn(const ResponseSet& rs, const ActivationSpec& spec, const PsoConfig& cfg);

}  // namespace fcm
