#pragma once

// Experiment orchestration: hyperparameter random search, leave-one-out
// evaluation, and end-to-end synthetic or file-based experiments.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcm/datagen.hpp"
#include "fcm/io.hpp"
#include "fcm/learner.hpp"
#include "fcm/metrics.hpp"
#include "fcm/pso.hpp"

namespace fcm {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SearchSpace {
  Interval alpha{0.0, 0.3};
  Interval beta{0.0, 0.5};
  Interval lambda{0.0, 5.5};
  int budget = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Candidate {
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double data_error = 0.0;
};

struct SearchResult {
  Candidate best;
  WeightMatrix weights{1};
  std::vector<Candidate> candidates;  // in sampling order
};

// Samples `budget` independent uniform (alpha, beta, lambda) triples from the
// open intervals, learns with each on the full set, and keeps the triple with
// the lowest data error (first one wins ties). `base` supplies the activation
// family and solver settings.
SearchResult random_search(const ResponseSet& rs, const SearchSpace& space, const LearnConfig& base);

// A method under evaluation: fits weights on a response set; the learned map
// is simulated with `activation`.
struct Learner {
  std::string name;
  ActivationSpec activation;
  std::function<WeightMatrix(const ResponseSet&)> fit;
};

Learner lefcm_learner(const LearnConfig& cfg);
Learner pso_learner(const ActivationSpec& activation, const PsoConfig& cfg);

// Known ground truth, enabling the out-of-sample, model, and SS Mean metrics.
struct TargetInfo {
  WeightMatrix weights;
  ActivationSpec activation;
  std::size_t eval_m = 0;  // fresh initial vectors per fold; 0 = same as the data's m
  std::size_t eval_k = 0;  // steps per fresh run; 0 = same as the data's k
  std::uint64_t seed = 0;  // fresh initials for fold s use derive_seed(seed, s)
};

struct LooResult {
  std::vector<MetricsReport> folds;
  AggregateReport summary;
};

// Fold s trains on every sequence except s, then reports the data error of
// the learned map on the held-out sequence, plus the target comparisons when
// a target is known. Execution time covers the fit call only.
LooResult leave_one_out(const ResponseSet& rs, const Learner& learner, const std::optional<TargetInfo>& target);
LooResult leave_one_out(const ResponseSet& rs, const LearnConfig& cfg, const std::optional<TargetInfo>& target);

inline constexpr int kHistogramBins = 41;

struct Histogram {
  std::vector<double> edges;  // kHistogramBins + 1 edges over [-1, 1]
  std::vector<std::size_t> counts;
};

Histogram weight_histogram(const WeightMatrix& w, int bins = kHistogramBins);
std::string histogram_to_csv(const Histogram& h);

struct ExperimentConfig {
  // Synthetic data: either a named preset or explicit map fields.
  std::optional<std::string> preset;
  RandomFcmSpec map_spec;
  std::size_t m = 5;
  std::size_t k = 100;
  // Or external data (time-series CSV) with an optional known target map.
  std::optional<std::string> data_path;
  std::optional<std::string> target_path;
  // lambda of a file-provided target map (defaults to the mapSpec lambda)
  std::optional<double> target_lambda;

  Family activation = Family::Sigmoid;
  NoiseSpec noise;
  SearchSpace search;
  int trials = 1;
  std::size_t eval_m = 0;
  std::size_t eval_k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"lefcm"};
  PsoConfig pso;
  LearnConfig learner;
  // Skips the random search when set: (alpha, beta, lambda).
  std::optional<Candidate> hyperparameters;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const json& j);
json experiment_config_to_json(const ExperimentConfig& cfg);

struct MethodTrial {
  std::string method;
  std::optional<Candidate> hyperparameters;  // LEFCM only
  WeightMatrix learned{1};                   // fitted on the full training set
  LooResult loo;
};

struct TrialResult {
  std::optional<WeightMatrix> generator;
  ActivationSpec data_activation{Family::Sigmoid, 1.0};
  ResponseSet data;
  std::vector<MethodTrial> methods;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  // Per method: aggregate over trials of the per-trial leave-one-out means.
  std::vector<std::pair<std::string, AggregateReport>> summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes config.json, metrics_<method>.json, and per-trial artifacts
// (generator.json, learned_<method>.json, hist_<source>.csv,
// timeseries/<s>.csv). A single trial writes its artifacts at the top level,
// otherwise under trial_<t>/.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ExperimentResult& result);

json metrics_json(const std::string& method, const ExperimentResult& result);

}  // namespace fcm
