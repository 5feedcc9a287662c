#include "fcm/metrics.hpp"

#include <cmath>

namespace fcm {

double ConfusionCounts::specificity() const {
  return tn + fp == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
}

double ConfusionCounts::sensitivity() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double ConfusionCounts::ss_mean() const {
  const double spec = specificity();
  const double sens = sensitivity();
  return spec + sens == 0.0 ? 0.0 : 2.0 * spec * sens / (spec + sens);
}

namespace {

void same_size(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.n() != b.n()) {
    throw DimensionError("weight matrices differ in size: " + std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  }
}

}  // namespace

double data_error(const ResponseSet& target, const WeightMatrix& learned, const ActivationSpec& spec) {
  target.validate(1);
  if (target.n() != learned.n()) throw DimensionError("response set and weight matrix disagree on n");
  double acc = 0.0;
  for (std::size_t s = 0; s < target.m(); ++s) {
    const Matrix sim = simulate(target.initials[s], learned, spec, target.k());
    acc += (sim - target.sequences[s]).squaredNorm();
  }
  return acc / static_cast<double>(target.m() * target.n() * target.k());
}

double out_of_sample_error(const WeightMatrix& target, const ActivationSpec& target_spec,
                           const WeightMatrix& learned, const ActivationSpec& learned_spec,
                           const std::vector<StateVector>& initials, std::size_t k) {
  same_size(target, learned);
  if (initials.empty()) throw DataError("out-of-sample error needs at least one initial vector");
  if (k == 0) throw ConfigError("out-of-sample error needs k >= 1");
  double acc = 0.0;
  for (const auto& x0 : initials) {
    acc += (simulate(x0, target, target_spec, k) - simulate(x0, learned, learned_spec, k)).cwiseAbs().sum();
  }
  return acc / static_cast<double>(initials.size() * target.n() * k);
}

double out_of_sample_error(const WeightMatrix& target, const WeightMatrix& learned, const ActivationSpec& spec,
                           const std::vector<StateVector>& initials, std::size_t k) {
  return out_of_sample_error(target, spec, learned, spec, initials, k);
}

double model_error(const WeightMatrix& target, const WeightMatrix& learned) {
  same_size(target, learned);
  return (target.matrix() - learned.matrix()).cwiseAbs().mean();
}

ConfusionCounts confusion(const WeightMatrix& target, const WeightMatrix& learned, double threshold) {
  same_size(target, learned);
  ConfusionCounts c;
  const Matrix& a = target.matrix();
  const Matrix& b = learned.matrix();
  for (Eigen::Index idx = 0; idx < a.size(); ++idx) {
    const bool target_link = std::abs(a(idx)) > threshold;
    const bool learned_link = std::abs(b(idx)) > threshold;
    if (!target_link && !learned_link) ++c.tp;
    else if (target_link && learned_link) ++c.tn;
    else if (target_link) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double ss_mean(const WeightMatrix& target, const WeightMatrix& learned, double threshold) {
  return confusion(target, learned, threshold).ss_mean();
}

Stat mean_std(const std::vector<double>& values) {
  if (values.empty()) throw DataError("cannot aggregate an empty list");
  // shifted by the first value so identical entries give exactly zero spread
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double offset = sum / static_cast<double>(values.size());
  const double mean = shift + offset;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

AggregateReport aggregate(const std::vector<MetricsReport>& trials) {
  if (trials.empty()) throw DataError("cannot aggregate an empty list of trials");
  const bool has_oos = trials.front().out_of_sample_error.has_value();
  const bool has_model = trials.front().model_error.has_value();
  const bool has_ss = trials.front().ss_mean.has_value();
  std::vector<double> de, oos, me, ss, secs;
  for (const auto& t : trials) {
    if (t.out_of_sample_error.has_value() != has_oos || t.model_error.has_value() != has_model || t.ss_mean.has_value() != has_ss) {
      throw DataError("trials disagree on which optional metrics are present");
    }
    de.push_back(t.data_error);
    if (has_oos) oos.push_back(*t.out_of_sample_error);
    secs.push_back(t.execution_seconds);
    if (has_model) me.push_back(*t.model_error);
    if (has_ss) ss.push_back(*t.ss_mean);
  }
  AggregateReport out;
  out.trials = trials.size();
  out.data_error = mean_std(de);
  if (has_oos) out.out_of_sample_error = mean_std(oos);
  out.execution_seconds = mean_std(secs);
  if (has_model) out.model_error = mean_std(me);
  if (has_ss) out.ss_mean = mean_std(ss);
  return out;
}

}  // namespace fcm
