#include "fcm/pso.hpp"

#include <algorithm>
#include <cmath>

#include "fcm/metrics.hpp"
#include "fcm/rng.hpp"

namespace fcm {

void PsoConfig::validate() const {
  if (population_size < 2) throw ConfigError("PSO population size must be >= 2");
  if (max_iters < 1) throw ConfigError("PSO maxIters must be >= 1");
  if (!(inertia_start >= inertia_end)) throw ConfigError("PSO inertia must not increase");
  if (stall_window < 1) throw ConfigError("PSO stall window must be >= 1");
  if (!(velocity_max > 0.0)) throw ConfigError("PSO velocity clamp must be > 0");
}

double fitness(const WeightMatrix& w, const ResponseSet& rs, const ActivationSpec& spec) {
  return data_error(rs, w, spec);
}

namespace {

struct Particle {
  Vector position;
  Vector velocity;
  Vector best_position;
  double best_fitness;
};

double evaluate(const Vector& flat, std::size_t n, const ResponseSet& rs, const ActivationSpec& spec) {
  const auto nn = static_cast<Eigen::Index>(n);
  // flat vectors are column-major views of W
  return fitness(WeightMatrix(Matrix(Eigen::Map<const Matrix>(flat.data(), nn, nn))), rs, spec);
}

}  // namespace

PsoResult pso_learn_detailed(const ResponseSet& rs, const ActivationSpec& spec, const PsoConfig& cfg) {
  cfg.validate();
  rs.validate(1);
  const std::size_t n = rs.n();
  const auto dims = static_cast<Eigen::Index>(n * n);
  Rng rng(cfg.seed);

  std::vector<Particle> swarm(cfg.population_size);
  for (auto& p : swarm) {
    p.position.resize(dims);
    p.velocity.resize(dims);
    for (Eigen::Index d = 0; d < dims; ++d) p.position(d) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index d = 0; d < dims; ++d) p.velocity(d) = rng.uniform(-cfg.velocity_max, cfg.velocity_max);
  }
  for (auto& p : swarm) {
    p.best_position = p.position;
    p.best_fitness = evaluate(p.position, n, rs, spec);
  }

  std::size_t leader = 0;
  for (std::size_t i = 1; i < swarm.size(); ++i) {
    if (swarm[i].best_fitness < swarm[leader].best_fitness) leader = i;
  }
  Vector gbest = swarm[leader].best_position;
  double gbest_fitness = swarm[leader].best_fitness;

  PsoResult result;
  result.best_initial_fitness = gbest_fitness;
  result.history.push_back(gbest_fitness);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double progress = cfg.max_iters > 1 ? static_cast<double>(iter) / (cfg.max_iters - 1) : 0.0;
    const double inertia = cfg.inertia_start - (cfg.inertia_start - cfg.inertia_end) * progress;

    for (auto& p : swarm) {
      for (Eigen::Index d = 0; d < dims; ++d) {
        const double r1 = rng.uniform01();
        const double r2 = rng.uniform01();
        double v = inertia * p.velocity(d) + cfg.accel1 * r1 * (p.best_position(d) - p.position(d)) +
                   cfg.accel2 * r2 * (gbest(d) - p.position(d));
        v = std::clamp(v, -cfg.velocity_max, cfg.velocity_max);
        p.velocity(d) = v;
        p.position(d) = std::clamp(p.position(d) + v, -1.0, 1.0);
      }
    }
    // Synchronous update: evaluate everyone, then fold the global best in particle order.
    for (auto& p : swarm) {
      const double f = evaluate(p.position, n, rs, spec);
      if (f < p.best_fitness) {
        p.best_fitness = f;
        p.best_position = p.position;
      }
    }
    for (const auto& p : swarm) {
      if (p.best_fitness < gbest_fitness) {
        gbest_fitness = p.best_fitness;
        gbest = p.best_position;
      }
    }
    result.history.push_back(gbest_fitness);
    result.iterations = iter + 1;

    const auto h = result.history.size();
    const auto window = static_cast<std::size_t>(cfg.stall_window);
    if (h > window && result.history[h - 1 - window] - result.history[h - 1] < cfg.min_error_grad) break;
  }

  const auto nn = static_cast<Eigen::Index>(n);
  result.weights = WeightMatrix(Matrix(Eigen::Map<const Matrix>(gbest.data(), nn, nn)));
  result.fitness = gbest_fitness;
  return result;
}

WeightMatrix pso_learn(const ResponseSet& rs, const ActivationSpec& spec, const PsoConfig& cfg) {
  return pso_learn_detailed(rs, spec, cfg).weights;
}

}  // namespace fcm
