#pragma once

// Convex learning of FCM weights.
//
// For each node i, observed consecutive state pairs give a linear system
// X w_i ~= f^-1(next state of node i). Column i of W is the minimizer over the
// box |w| <= 1 of
//
//   ||X w - Y||_2 + beta * ||w||_1 - alpha * H(w),
//   H(w) = -sum_j p_j ln p_j,  p_j = (w_j + 1) / 2,
//
// a convex problem (norm + L1 + negative of a concave entropy surrogate).
// Columns are independent, so the full matrix is n separate solves.

#include <cstddef>
#include <string>
#include <vector>

#include "fcm/core.hpp"

namespace fcm {

struct LearnConfig {
  double alpha = 0.0;  // entropy weight
  double beta = 0.0;   // L1 weight
  ActivationSpec activation{Family::Sigmoid, 1.0};
  double clamp_eps = kDefaultClampEps;
  double entropy_floor = 1e-12;  // floor for (w+1)/2 inside the log
  double smooth_mu = 1e-8;       // smoothing of the residual norm (and L1 in objective_gradient)
  int max_iters = 10000;
  double grad_tol = 1e-6;
  double obj_tol = 1e-9;

  void validate() const;
};

struct NodeSystem {
  Matrix x;  // M x n stacked observed states
  Vector y;  // length M, inverse-activated next states of node `node`
  std::size_t node = 0;
};

// Stacks rows 0..k-2 of every sequence into X, the matching inverse-activated
// rows 1..k-1 of column i into Y. The initial vectors are not used, so
// M = m (k - 1).
NodeSystem assemble_system(const ResponseSet& rs, std::size_t i, const LearnConfig& cfg);

// Shared design matrix X for every node of `rs`.
Matrix assemble_design(const ResponseSet& rs);
// Right-hand side Y for node i.
Vector assemble_target(const ResponseSet& rs, std::size_t i, const LearnConfig& cfg);

// Entropy surrogate H(w) in nats, with 0 ln 0 = 0.
double entropy_surrogate(const Vector& w, double entropy_floor);

// Exact objective: ||Xw - Y|| + beta |w|_1 - alpha H(w).
double objective(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg);

// The same objective with the norm and L1 terms smoothed by smooth_mu:
// sqrt(||r||^2 + mu^2) + beta sum sqrt(w_j^2 + mu^2) - alpha H(w).
double smoothed_objective(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg);

// Gradient of smoothed_objective.
Vector objective_gradient(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg);

struct SolveResult {
  Vector w;
  double objective = 0.0;  // exact objective at w
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> trace;  // solver merit value after each accepted iterate, starting at w = 0
};

SolveResult solve_column_detailed(const NodeSystem& sys, const LearnConfig& cfg);
Vector solve_column(const NodeSystem& sys, const LearnConfig& cfg);

// Learns all n columns. With threads > 1 the columns are distributed over a
// worker pool; the result does not depend on the thread count.
WeightMatrix learn(const ResponseSet& rs, const LearnConfig& cfg, unsigned threads = 1);

}  // namespace fcm
