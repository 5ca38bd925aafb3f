#pragma once

#include <atomic>
#include <cmath>
#include <span>
#include <thread>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/learners/one_r.hpp"
#include "credulous/learners/tree.hpp"
#include "credulous/random.hpp"

namespace cred {

struct ForestModel {
  std::vector<DecisionTree> trees;

  /// Fraction of trees voting POSITIVE (strict majority at their leaf).
  double score(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees) {
      const auto& leaf = t.nodes[t.leaf_index(x)];
      votes += majority(leaf.pos, leaf.neg) == ClassLabel::Positive ? 1 : 0;
    }
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }

  bool operator==(const ForestModel&) const = default;
};

struct ForestOptions {
  std::size_t n_trees = 100;
  std::size_t features_per_split = 0;  // 0 = ceil(sqrt(dims))
  std::size_t min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Tree t draws all of its randomness from derive_seed(seed, t), so the
/// result does not depend on the worker count.
inline ForestModel fit_forest_model(const Dataset& d, const ForestOptions& opt) {
  require_both_classes(d);
  if (opt.n_trees < 1) throw Error("invalid_n_trees", "n_trees must be >= 1");
  const Matrix m = to_matrix(d);
  const std::size_t mtry = opt.features_per_split != 0
                               ? std::min(opt.features_per_split, m.dims)
                               : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m.dims))));
  ForestModel model;
  model.trees.resize(opt.n_trees);

  auto build = [&](std::size_t t) {
    Rng rng(derive_seed(opt.seed, t));
    std::vector<std::size_t> sample(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
      sample[i] = opt.bootstrap ? static_cast<std::size_t>(uniform_index(rng, m.rows)) : i;
    GrowOptions g;
    g.min_leaf = opt.min_leaf;
    g.features_per_split = mtry;
    g.rng = &rng;
    model.trees[t] = grow_tree(m, std::move(sample), g);
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, opt.n_trees));
  if (workers == 1) {
    for (std::size_t t = 0; t < opt.n_trees; ++t) build(t);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < opt.n_trees; t = next++) build(t);
    });
  pool.clear();
  return model;
}

}  // namespace cred
