#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/learners/one_r.hpp"
#include "credulous/learners/tree.hpp"
#include "credulous/random.hpp"

namespace cred {

struct RepTreeModel {
  DecisionTree tree;

  double score(std::span<const double> x) const { return tree.score(x); }
  bool operator==(const RepTreeModel&) const = default;
};

struct GrowPruneSplit {
  std::vector<std::size_t> grow;
  std::vector<std::size_t> prune;
};

/// Seeded stratified split: each class contributes round(grow_fraction * n_c)
/// rows (at least one) to the grow partition, the rest to the prune partition.
inline GrowPruneSplit stratified_grow_prune_split(const Matrix& m, double grow_fraction, std::uint64_t seed) {
  Rng rng(seed);
  GrowPruneSplit out;
  for (auto cls : {ClassLabel::Negative, ClassLabel::Positive}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.rows; ++i)
      if (m.labels[i] == cls) rows.push_back(i);
    shuffle(std::span<std::size_t>(rows), rng);
    auto n_grow = static_cast<std::size_t>(std::llround(grow_fraction * static_cast<double>(rows.size())));
    n_grow = std::clamp<std::size_t>(n_grow, rows.empty() ? 0 : 1, rows.size());
    out.grow.insert(out.grow.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_grow));
    out.prune.insert(out.prune.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_grow), rows.end());
  }
  std::sort(out.grow.begin(), out.grow.end());
  std::sort(out.prune.begin(), out.prune.end());
  return out;
}

inline RepTreeModel fit_rep_tree_model(const Dataset& d, double grow_fraction, std::size_t max_depth,
                                       std::size_t min_leaf, std::uint64_t seed) {
  require_both_classes(d);
  if (d.size() < 4) throw Error("too_few_instances", "REP tree needs at least 4 instances");
  if (!(grow_fraction > 0.0 && grow_fraction < 1.0)) throw Error("invalid_grow_fraction", "must be in (0, 1)");
  const Matrix m = to_matrix(d);
  const auto split = stratified_grow_prune_split(m, grow_fraction, seed);
  GrowOptions opt;
  opt.max_depth = max_depth;
  opt.min_leaf = min_leaf;
  auto tree = grow_tree(m, split.grow, opt);
  return {reduced_error_prune(std::move(tree), m, split.prune)};
}

}  // namespace cred
