#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/learners/one_r.hpp"

namespace cred {

/// Gaussian naive Bayes. Index 0 of each array is NEGATIVE, 1 is POSITIVE.
struct NaiveBayesModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;

  double log_joint(std::size_t cls, std::span<const double> x) const {
    double lp = log_prior[cls];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = variance[cls][j];
      const double d = x[j] - mean[cls][j];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    return lp;
  }

  /// Posterior of POSITIVE.
  double score(std::span<const double> x) const {
    const double neg = log_joint(0, x), pos = log_joint(1, x);
    const double hi = std::max(neg, pos);
    return std::exp(pos - hi) / (std::exp(pos - hi) + std::exp(neg - hi));
  }

  bool operator==(const NaiveBayesModel&) const = default;
};

// Statistics are summed over sorted values so the fit does not depend on
// instance order.
inline NaiveBayesModel fit_naive_bayes_model(const Dataset& d, double variance_floor = 1e-9) {
  require_both_classes(d);
  const Matrix m = to_matrix(d);
  const auto counts = dataset_class_counts(d);
  const std::array<double, 2> n{static_cast<double>(counts.negatives), static_cast<double>(counts.positives)};
  NaiveBayesModel model;
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(n[c] / static_cast<double>(m.rows));
    model.mean[c].assign(m.dims, 0.0);
    model.variance[c].assign(m.dims, 0.0);
  }
  std::vector<double> column;
  for (std::size_t j = 0; j < m.dims; ++j)
    for (std::size_t c = 0; c < 2; ++c) {
      column.clear();
      for (std::size_t i = 0; i < m.rows; ++i)
        if (static_cast<std::size_t>(m.labels[i]) == c) column.push_back(m.at(i, j));
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (double v : column) sum += v;
      const double mu = sum / n[c];
      std::vector<double> sq;
      sq.reserve(column.size());
      for (double v : column) sq.push_back((v - mu) * (v - mu));
      std::sort(sq.begin(), sq.end());
      double ss = 0.0;
      for (double v : sq) ss += v;
      model.mean[c][j] = mu;
      model.variance[c][j] = std::max(ss / n[c], variance_floor);
    }
  return model;
}

}  // namespace cred
