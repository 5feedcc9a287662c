#pragma once

// Synthetic maps and response data: random sparse FCMs, random initial
// states, noise-free trajectories, and additive Gaussian noise.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fcm/core.hpp"

namespace fcm {

struct RandomFcmSpec {
  std::size_t n = 20;
  double density = 0.2;  // fraction of the n*n positions drawn nonzero
  ActivationSpec activation{Family::Sigmoid, 5.0};
  std::uint64_t seed = 0;
  double prune_threshold = 0.05;  // drawn values with smaller magnitude become 0

  void validate() const;
};

struct NoiseSpec {
  double mu = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Named map configurations used in the experiments (C20, C40, C100, C200).
struct MapPreset {
  std::string name;
  std::size_t n;
  double lambda_sigmoid;
  double lambda_tanh;
  double density;
  std::size_t m;
  std::size_t k;

  double lambda(Family family) const { return family == Family::Sigmoid ? lambda_sigmoid : lambda_tanh; }
};

const std::vector<MapPreset>& map_presets();
const MapPreset& map_preset(const std::string& name);

WeightMatrix generate_fcm(const RandomFcmSpec& spec);

std::vector<StateVector> generate_initials(std::size_t m, std::size_t n, Family family, std::uint64_t seed);

ResponseSet generate_responses(const WeightMatrix& fcm, const ActivationSpec& spec,
                               const std::vector<StateVector>& initials, std::size_t k);

// Adds i.i.d. N(mu, sigma) to every observed entry. Initial vectors are left
// untouched and nothing is clamped.
ResponseSet add_noise(const ResponseSet& rs, const NoiseSpec& noise);

}  // namespace fcm
