#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "credulous/datamodel.hpp"

namespace oracle {

using cred::ClassLabel;
using cred::Dataset;

struct Ratio {
  long long num = 0;
  long long den = 0;  // 0 means the convention value applies
};

struct ExactMetrics {
  Ratio accuracy, precision, recall;
  double accuracy_percent = 0, precision_value = 0, recall_value = 0, f1 = 0;
};

inline ExactMetrics metrics(long long tp, long long fp, long long fn, long long tn) {
  ExactMetrics m;
  m.accuracy = {tp + tn, tp + fp + fn + tn};
  m.precision = {tp, tp + fp};
  m.recall = {tp, tp + fn};
  m.accuracy_percent = 100.0 * static_cast<double>(m.accuracy.num) / static_cast<double>(m.accuracy.den);
  m.precision_value = m.precision.den == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(m.precision.den);
  m.recall_value = m.recall.den == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(m.recall.den);
  // F1 as a ratio of integers when both rates are defined: 2tp / (2tp + fp + fn).
  if (m.precision.den != 0 && m.recall.den != 0)
    m.f1 = tp == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
  else {
    const double p = m.precision_value, r = m.recall_value;
    m.f1 = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
  }
  return m;
}

/// P(pos > neg) + 0.5 P(pos == neg) over every pair.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  long long twice_wins = 0;
  for (double p : pos)
    for (double n : neg) twice_wins += p > n ? 2 : p == n ? 1 : 0;
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos.size() * neg.size()));
}

/// Training errors of the min-bucket 1R discretization of one column:
/// distinct values in ascending order are absorbed into the open bucket,
/// which closes when its majority count reaches min_bucket. Merging adjacent
/// same-class buckets cannot change the error, so it is skipped here.
inline std::size_t one_r_errors(const Dataset& d, std::size_t feature, std::size_t min_bucket) {
  std::map<double, std::pair<std::size_t, std::size_t>> by_value;  // value -> (pos, neg)
  for (const auto& inst : d.instances) {
    auto& c = by_value[inst.features.values[feature]];
    (inst.label == ClassLabel::Positive ? c.first : c.second)++;
  }
  const std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> runs(by_value.begin(), by_value.end());
  std::size_t errors = 0, pos = 0, neg = 0;
  bool open = false;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    pos += runs[r].second.first;
    neg += runs[r].second.second;
    open = true;
    if (std::max(pos, neg) < min_bucket) continue;
    const bool positive_majority = pos > neg;
    if (r + 1 < runs.size()) {
      const auto [np, nn] = runs[r + 1].second;
      if (positive_majority ? nn == 0 : np == 0) continue;
    }
    errors += positive_majority ? neg : pos;
    pos = neg = 0;
    open = false;
  }
  if (open) errors += pos > neg ? neg : pos;
  return errors;
}

struct OneRChoice {
  std::size_t feature = 0;
  std::size_t errors = 0;
};

/// Every feature's rule is enumerated; the fewest errors wins, earliest on ties.
inline OneRChoice one_r(const Dataset& d, std::size_t min_bucket) {
  OneRChoice best{0, one_r_errors(d, 0, min_bucket)};
  for (std::size_t f = 1; f < d.schema.size(); ++f) {
    const auto e = one_r_errors(d, f, min_bucket);
    if (e < best.errors) best = {f, e};
  }
  return best;
}

inline double gaussian_density(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

/// Posterior of POSITIVE under independent Gaussians with population variances.
inline double gaussian_posterior(const Dataset& d, const std::vector<double>& x) {
  double like[2] = {1.0, 1.0};
  double count[2] = {0, 0};
  for (const auto& inst : d.instances) count[inst.label == ClassLabel::Positive]++;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int c = 0; c < 2; ++c) {
      double sum = 0, sq = 0;
      for (const auto& inst : d.instances)
        if ((inst.label == ClassLabel::Positive) == (c == 1)) sum += inst.features.values[j];
      const double mean = sum / count[c];
      for (const auto& inst : d.instances)
        if ((inst.label == ClassLabel::Positive) == (c == 1))
          sq += (inst.features.values[j] - mean) * (inst.features.values[j] - mean);
      like[c] *= gaussian_density(x[j], mean, sq / count[c]);
    }
  const double n = count[0] + count[1];
  const double p1 = like[1] * count[1] / n, p0 = like[0] * count[0] / n;
  return p1 / (p1 + p0);
}

/// Training accuracy (fraction) of the nearest-class-centroid rule.
inline double nearest_centroid_accuracy(const Dataset& d) {
  const std::size_t dims = d.schema.size();
  std::vector<double> centre[2] = {std::vector<double>(dims, 0.0), std::vector<double>(dims, 0.0)};
  double count[2] = {0, 0};
  for (const auto& inst : d.instances) {
    const int c = inst.label == ClassLabel::Positive;
    count[c]++;
    for (std::size_t j = 0; j < dims; ++j) centre[c][j] += inst.features.values[j];
  }
  for (int c = 0; c < 2; ++c)
    for (auto& v : centre[c]) v /= count[c];
  std::size_t correct = 0;
  for (const auto& inst : d.instances) {
    double dist[2] = {0, 0};
    for (int c = 0; c < 2; ++c)
      for (std::size_t j = 0; j < dims; ++j)
        dist[c] += (inst.features.values[j] - centre[c][j]) * (inst.features.values[j] - centre[c][j]);
    const bool predicted_positive = dist[1] < dist[0];
    correct += predicted_positive == (inst.label == ClassLabel::Positive) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

/// Population mean and standard deviation.
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

}  // namespace oracle
