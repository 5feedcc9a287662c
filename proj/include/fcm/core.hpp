#pragma once

// Fuzzy cognitive map domain types and forward dynamics.
//
// A map with n concepts is described by an n x n weight matrix W, where
// entry (j, i) is the weight of the edge from concept j to concept i. The
// state of concept i at t+1 is f(sum_j A_j(t) * w_ji), i.e. the row state
// vector times column i of W, squashed by a sigmoid or tanh activation.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Activation state vector A(t); dense, length n.
using StateVector = Eigen::VectorXd;

enum class Family { Sigmoid, Tanh };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Activation family plus its shape parameter lambda (> 0).
class ActivationSpec {
 public:
  ActivationSpec(Family family, double lambda);

  Family family() const { return family_; }
  double lambda() const { return lambda_; }

  // Closed range of the family: [0, 1] for sigmoid, [-1, 1] for tanh.
  double range_low() const { return family_ == Family::Sigmoid ? 0.0 : -1.0; }
  double range_high() const { return 1.0; }

  bool operator==(const ActivationSpec&) const = default;

 private:
  Family family_;
  double lambda_;
};

inline constexpr double kDefaultClampEps = 1e-6;

double activate(double x, const ActivationSpec& spec);

// Inverse activation. The argument is first clamped into the open range
// shrunk by clamp_eps, so noisy observations outside (0,1) or (-1,1) still map
// to finite values.
double activate_inverse(double y, const ActivationSpec& spec,
                        double clamp_eps = kDefaultClampEps);

// Square weight matrix with every |w_ji| <= 1.
class WeightMatrix {
 public:
  explicit WeightMatrix(std::size_t n);  // all zeros
  explicit WeightMatrix(Matrix weights);

  std::size_t n() const { return static_cast<std::size_t>(w_.rows()); }
  double operator()(std::size_t j, std::size_t i) const { return w_(j, i); }
  void set(std::size_t j, std::size_t i, double value);

  // Incoming weights of node i.
  auto column(std::size_t i) const { return w_.col(static_cast<Eigen::Index>(i)); }
  void set_column(std::size_t i, const Vector& values);

  const Matrix& matrix() const { return w_; }

  bool operator==(const WeightMatrix& other) const;

 private:
  Matrix w_;
};

// m observed response sequences. Sequence s is a k x n matrix whose row t is
// the observed state at step t+1, following the stored initial vector.
struct ResponseSet {
  std::vector<StateVector> initials;
  std::vector<Matrix> sequences;

  std::size_t m() const { return sequences.size(); }
  std::size_t k() const { return sequences.empty() ? 0 : static_cast<std::size_t>(sequences.front().rows()); }
  std::size_t n() const { return sequences.empty() ? 0 : static_cast<std::size_t>(sequences.front().cols()); }

  // Throws DataError unless m >= 1, k >= min_k, and all shapes agree.
  void validate(std::size_t min_k = 2) const;

  // All sequences except `held_out`, preserving order.
  ResponseSet without(std::size_t held_out) const;
  ResponseSet only(std::size_t index) const;

  // Exact element-wise equality, shapes included.
  bool operator==(const ResponseSet& other) const;
};

StateVector step(const StateVector& state, const WeightMatrix& w, const ActivationSpec& spec);

// k successive steps from `initial`; row t holds the state after t+1 steps.
Matrix simulate(const StateVector& initial, const WeightMatrix& w, const ActivationSpec& spec,
                std::size_t k);

}  // namespace fcm
