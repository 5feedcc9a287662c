#include "fcm/datagen.hpp"

#include <cmath>
#include <numeric>

#include "fcm/rng.hpp"

namespace fcm {

void RandomFcmSpec::validate() const {
  if (n == 0) throw ConfigError("random FCM needs n >= 1");
  if (!(density > 0.0 && density <= 1.0)) throw ConfigError("density must lie in (0, 1]");
  if (!(prune_threshold >= 0.0)) throw ConfigError("prune threshold must be >= 0");
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be >= 0");
  if (!std::isfinite(mu)) throw ConfigError("noise mu must be finite");
}

const std::vector<MapPreset>& map_presets() {
  static const std::vector<MapPreset> presets = {
      {"C20", 20, 5.0, 1.0, 0.20, 5, 100},
      {"C40", 40, 5.0, 1.0, 0.40, 10, 40},
      {"C100", 100, 0.7, 0.8, 0.30, 5, 20},
      {"C200", 200, 0.2, 0.4, 0.30, 10, 10},
  };
  return presets;
}

const MapPreset& map_preset(const std::string& name) {
  for (const auto& p : map_presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown map preset '" + name + "'");
}

WeightMatrix generate_fcm(const RandomFcmSpec& spec) {
  spec.validate();
  const std::size_t cells = spec.n * spec.n;
  const auto count = static_cast<std::size_t>(std::floor(spec.density * static_cast<double>(cells) + 1e-9));

  Rng rng(spec.seed);
  std::vector<std::size_t> positions(cells);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots become a uniform sample without replacement.
  for (std::size_t a = 0; a < count; ++a) {
    const std::size_t b = a + static_cast<std::size_t>(rng.below(cells - a));
    std::swap(positions[a], positions[b]);
  }

  WeightMatrix w(spec.n);
  for (std::size_t a = 0; a < count; ++a) {
    double value = rng.uniform(-1.0, 1.0);
    if (std::abs(value) < spec.prune_threshold) value = 0.0;
    // positions enumerate the grid row-major: (j, i) = (p / n, p % n)
    w.set(positions[a] / spec.n, positions[a] % spec.n, value);
  }
  return w;
}

std::vector<StateVector> generate_initials(std::size_t m, std::size_t n, Family family, std::uint64_t seed) {
  if (m == 0) throw ConfigError("need at least one initial vector");
  if (n == 0) throw ConfigError("need n >= 1");
  const double lo = family == Family::Sigmoid ? 0.0 : -1.0;
  Rng rng(seed);
  std::vector<StateVector> out;
  out.reserve(m);
  for (std::size_t s = 0; s < m; ++s) {
    StateVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(lo, 1.0);
    out.push_back(std::move(v));
  }
  return out;
}

ResponseSet generate_responses(const WeightMatrix& fcm, const ActivationSpec& spec,
                               const std::vector<StateVector>& initials, std::size_t k) {
  if (k < 2) throw ConfigError("response sequences need k >= 2");
  if (initials.empty()) throw ConfigError("need at least one initial vector");
  ResponseSet rs;
  rs.initials = initials;
  rs.sequences.reserve(initials.size());
  for (const auto& x0 : initials) rs.sequences.push_back(simulate(x0, fcm, spec, k));
  return rs;
}

ResponseSet add_noise(const ResponseSet& rs, const NoiseSpec& noise) {
  noise.validate();
  ResponseSet out = rs;
  for (std::size_t s = 0; s < out.sequences.size(); ++s) {
    Rng rng(derive_seed(noise.seed, s));
    auto& d = out.sequences[s];
    for (Eigen::Index t = 0; t < d.rows(); ++t)
      for (Eigen::Index i = 0; i < d.cols(); ++i) d(t, i) += rng.normal(noise.mu, noise.sigma);
  }
  return out;
}

}  // namespace fcm
