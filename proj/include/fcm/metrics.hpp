#pragma once

// Evaluation metrics for learned maps and their aggregation over trials.

#include <cstddef>
#include <optional>
#include <vector>

#include "fcm/core.hpp"

namespace fcm {

// Confusion counts over the n*n link positions. The zero-weight (no-link)
// class is the positive class: TP counts target zeros learned as zeros, TN
// target links learned as links, FP target links learned as zeros, FN target
// zeros learned as links.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  double specificity() const;  // TN / (TN + FP), 0 when undefined
  double sensitivity() const;  // TP / (TP + FN), 0 when undefined
  double ss_mean() const;      // harmonic mean of the two, 0 when both are 0
};

inline constexpr double kLinkThreshold = 0.05;

// Mean squared error of free-run trajectories from each stored initial
// vector against the observed sequences.
double data_error(const ResponseSet& target, const WeightMatrix& learned, const ActivationSpec& spec);

// Mean absolute difference between trajectories of the target and learned
// maps from the same (fresh) initial vectors.
double out_of_sample_error(const WeightMatrix& target, const ActivationSpec& target_spec,
                           const WeightMatrix& learned, const ActivationSpec& learned_spec,
                           const std::vector<StateVector>& initials, std::size_t k);
double out_of_sample_error(const WeightMatrix& target, const WeightMatrix& learned, const ActivationSpec& spec,
                           const std::vector<StateVector>& initials, std::size_t k);

// Mean absolute element-wise weight difference.
double model_error(const WeightMatrix& target, const WeightMatrix& learned);

// |w| > threshold is a link; exactly at threshold is not.
ConfusionCounts confusion(const WeightMatrix& target, const WeightMatrix& learned,
                          double threshold = kLinkThreshold);
double ss_mean(const WeightMatrix& target, const WeightMatrix& learned, double threshold = kLinkThreshold);

struct MetricsReport {
  double data_error = 0.0;
  // The three comparisons below need a known target map.
  std::optional<double> out_of_sample_error;
  std::optional<double> model_error;
  std::optional<double> ss_mean;
  double execution_seconds = 0.0;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single trial
};

struct AggregateReport {
  std::size_t trials = 0;
  Stat data_error;
  std::optional<Stat> out_of_sample_error;
  std::optional<Stat> model_error;
  std::optional<Stat> ss_mean;
  Stat execution_seconds;
};

Stat mean_std(const std::vector<double>& values);

// Throws DataError for an empty list or when the optional fields are present
// in some trials and absent in others.
AggregateReport aggregate(const std::vector<MetricsReport>& trials);

}  // namespace fcm
