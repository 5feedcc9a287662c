#include "fcm/core.hpp"

#include <algorithm>
#include <cmath>

namespace fcm {

std::string to_string(Family family) {
  return family == Family::Sigmoid ? "sigmoid" : "tanh";
}

Family family_from_string(const std::string& name) {
  if (name == "sigmoid") return Family::Sigmoid;
  if (name == "tanh") return Family::Tanh;
  throw ConfigError("unknown activation family '" + name + "' (expected sigmoid or tanh)");
}

ActivationSpec::ActivationSpec(Family family, double lambda) : family_(family), lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("activation lambda must be positive and finite, got " + std::to_string(lambda));
  }
}

double activate(double x, const ActivationSpec& spec) {
  const double z = spec.lambda() * x;
  if (spec.family() == Family::Sigmoid) return 1.0 / (1.0 + std::exp(-z));
  return std::tanh(z);
}

double activate_inverse(double y, const ActivationSpec& spec, double clamp_eps) {
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
    throw ConfigError("clamp epsilon must lie in (0, 0.5)");
  }
  if (std::isnan(y)) throw NumericalError("activate_inverse: NaN observation");
  const double lo = spec.range_low() + clamp_eps;
  const double hi = spec.range_high() - clamp_eps;
  const double c = std::clamp(y, lo, hi);
  if (spec.family() == Family::Sigmoid) {
    return -std::log((1.0 - c) / c) / spec.lambda();
  }
  return std::log((1.0 + c) / (1.0 - c)) / (2.0 * spec.lambda());
}

namespace {

void check_weight(double v) {
  if (!(std::abs(v) <= 1.0)) {
    throw DataError("weight " + std::to_string(v) + " outside [-1, 1]");
  }
}

}  // namespace

WeightMatrix::WeightMatrix(std::size_t n) : w_(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) {
  if (n == 0) throw DimensionError("weight matrix needs n >= 1");
}

WeightMatrix::WeightMatrix(Matrix weights) : w_(std::move(weights)) {
  if (w_.rows() == 0 || w_.rows() != w_.cols()) {
    throw DimensionError("weight matrix must be square with n >= 1, got " + std::to_string(w_.rows()) +
                         "x" + std::to_string(w_.cols()));
  }
  for (Eigen::Index c = 0; c < w_.cols(); ++c)
    for (Eigen::Index r = 0; r < w_.rows(); ++r) check_weight(w_(r, c));
}

void WeightMatrix::set(std::size_t j, std::size_t i, double value) {
  check_weight(value);
  w_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
}

void WeightMatrix::set_column(std::size_t i, const Vector& values) {
  if (values.size() != w_.rows()) throw DimensionError("column length does not match n");
  for (Eigen::Index j = 0; j < values.size(); ++j) check_weight(values(j));
  w_.col(static_cast<Eigen::Index>(i)) = values;
}

bool WeightMatrix::operator==(const WeightMatrix& other) const {
  return w_.rows() == other.w_.rows() && w_ == other.w_;
}

void ResponseSet::validate(std::size_t min_k) const {
  if (sequences.empty()) throw DataError("response set is empty");
  if (initials.size() != sequences.size()) {
    throw DataError("response set has " + std::to_string(initials.size()) + " initial vectors for " +
                    std::to_string(sequences.size()) + " sequences");
  }
  const auto rows = sequences.front().rows();
  const auto cols = sequences.front().cols();
  if (cols == 0) throw DataError("response set has zero nodes");
  if (static_cast<std::size_t>(rows) < min_k) {
    throw DataError("response sequences need at least " + std::to_string(min_k) + " steps, got " +
                    std::to_string(rows));
  }
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    if (sequences[s].rows() != rows || sequences[s].cols() != cols) {
      throw DimensionError("sequence " + std::to_string(s) + " has a different shape");
    }
    if (initials[s].size() != cols) {
      throw DimensionError("initial vector " + std::to_string(s) + " has the wrong length");
    }
  }
}

ResponseSet ResponseSet::without(std::size_t held_out) const {
  if (held_out >= m()) throw DataError("held-out index out of range");
  ResponseSet out;
  for (std::size_t s = 0; s < m(); ++s) {
    if (s == held_out) continue;
    out.initials.push_back(initials[s]);
    out.sequences.push_back(sequences[s]);
  }
  return out;
}

ResponseSet ResponseSet::only(std::size_t index) const {
  if (index >= m()) throw DataError("sequence index out of range");
  return ResponseSet{{initials[index]}, {sequences[index]}};
}

bool ResponseSet::operator==(const ResponseSet& other) const {
  if (m() != other.m() || initials.size() != other.initials.size()) return false;
  for (std::size_t s = 0; s < initials.size(); ++s) {
    if (initials[s].size() != other.initials[s].size() || initials[s] != other.initials[s]) return false;
  }
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& a = sequences[s];
    const auto& b = other.sequences[s];
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

StateVector step(const StateVector& state, const WeightMatrix& w, const ActivationSpec& spec) {
  if (static_cast<std::size_t>(state.size()) != w.n()) {
    throw DimensionError("state length " + std::to_string(state.size()) + " does not match n = " +
                         std::to_string(w.n()));
  }
  // A(t) w_i for every i at once: W^T A(t).
  StateVector next = w.matrix().transpose() * state;
  for (Eigen::Index i = 0; i < next.size(); ++i) next(i) = activate(next(i), spec);
  return next;
}

Matrix simulate(const StateVector& initial, const WeightMatrix& w, const ActivationSpec& spec,
                std::size_t k) {
  if (k == 0) throw ConfigError("simulate needs k >= 1");
  Matrix out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w.n()));
  StateVector state = initial;
  for (std::size_t t = 0; t < k; ++t) {
    state = step(state, w, spec);
    out.row(static_cast<Eigen::Index>(t)) = state.transpose();
  }
  return out;
}

}  // namespace fcm
