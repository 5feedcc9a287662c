#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <Eigen/Dense>

#include <cstdint>

#include "fcm/datagen.hpp"
#include "fcm/learner.hpp"
#include "fcm/rng.hpp"

namespace fcm::testing {

struct Synthetic {
  WeightMatrix target;
  ActivationSpec activation;
  ResponseSet clean;
  ResponseSet noisy;
};

inline Synthetic make_synthetic(const MapPreset& preset, Family family, std::uint64_t seed, double sigma) {
  RandomFcmSpec spec;
  spec.n = preset.n;
  spec.density = preset.density;
  spec.activation = ActivationSpec(family, preset.lambda(family));
  spec.seed = derive_seed(seed, 1);
  WeightMatrix target = generate_fcm(spec);
  const auto initials = generate_initials(preset.m, preset.n, family, derive_seed(seed, 2));
  ResponseSet clean = generate_responses(target, spec.activation, initials, preset.k);
  ResponseSet noisy = add_noise(clean, NoiseSpec{0.0, sigma, derive_seed(seed, 3)});
  return {std::move(target), spec.activation, std::move(clean), std::move(noisy)};
}

// Ratio of extreme singular values of the stacked design matrix.
inline double design_condition(const ResponseSet& rs) {
  const Matrix x = assemble_design(rs);
  Eigen::JacobiSVD<Matrix> svd(x);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace fcm::testing
