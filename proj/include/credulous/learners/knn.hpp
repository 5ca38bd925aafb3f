#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/features.hpp"
#include "credulous/learners/tree.hpp"

namespace cred {

/// k-nearest neighbours over training data standardized with its own
/// statistics. Unweighted votes.
struct KnnModel {
  std::size_t k = 1;
  StandardizationTable table;
  Matrix train;  // standardized
  std::vector<std::string> ids;

  /// Indices of the k nearest rows: Euclidean distance, then lower account_id.
  std::vector<std::size_t> neighbours(std::span<const double> x) const {
    const auto q = table.apply(x);
    std::vector<std::pair<double, std::size_t>> dist(train.rows);
    for (std::size_t i = 0; i < train.rows; ++i) {
      double s = 0.0;
      const auto r = train.row(i);
      for (std::size_t j = 0; j < q.size(); ++j) s += (r[j] - q[j]) * (r[j] - q[j]);
      dist[i] = {s, i};
    }
    auto closer = [this](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return ids[a.second] < ids[b.second];
    };
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end(), closer);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(dist[i].second);
    return out;
  }

  /// Fraction of POSITIVE neighbours.
  double score(std::span<const double> x) const {
    std::size_t pos = 0;
    for (auto i : neighbours(x)) pos += train.positive(i) ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(k);
  }

  bool operator==(const KnnModel& o) const {
    return k == o.k && table == o.table && train.values == o.train.values && train.labels == o.train.labels &&
           ids == o.ids;
  }
};

inline KnnModel fit_knn_model(const Dataset& d, std::size_t k = 1) {
  if (k < 1) throw Error("invalid_k", "k must be >= 1");
  if (k > d.size())
    throw Error("k_exceeds_dataset", "k = " + std::to_string(k) + " but only " + std::to_string(d.size()) + " instances");
  KnnModel model;
  model.k = k;
  model.table = fit_standardization(d);
  model.train = to_matrix(apply_standardization(model.table, d));
  for (const auto& inst : d.instances) model.ids.push_back(inst.account_id);
  return model;
}

}  // namespace cred
