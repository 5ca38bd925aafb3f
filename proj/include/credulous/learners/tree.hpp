#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/random.hpp"

namespace cred {

/// Row-major copy of a dataset's features plus labels; what learners train on.
struct Matrix {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> values;
  std::vector<ClassLabel> labels;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dims, dims}; }
  double at(std::size_t i, std::size_t j) const { return values[i * dims + j]; }
  bool positive(std::size_t i) const { return labels[i] == ClassLabel::Positive; }
};

inline Matrix to_matrix(const Dataset& d) {
  Matrix m{d.size(), d.schema.size(), {}, {}};
  m.values.reserve(m.rows * m.dims);
  m.labels.reserve(m.rows);
  for (const auto& inst : d.instances) {
    m.values.insert(m.values.end(), inst.features.values.begin(), inst.features.values.end());
    m.labels.push_back(inst.label);
  }
  return m;
}

/// Majority label of a count pair; ties go to NEGATIVE.
constexpr ClassLabel majority(std::size_t pos, std::size_t neg) noexcept {
  return pos > neg ? ClassLabel::Positive : ClassLabel::Negative;
}

/// Cut point strictly between a < b that routes a left and b right under `x <= cut`.
inline double midpoint_cut(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid < b ? mid : a;
}

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t pos = 0;  // training instances reaching the node
  std::uint32_t neg = 0;

  bool leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary tree over numeric features, nodes stored in pre-order; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                          : nodes[i].right);
    return i;
  }

  /// POSITIVE fraction of the training instances at the reached leaf.
  double score(std::span<const double> x) const {
    const auto& n = nodes[leaf_index(x)];
    return static_cast<double>(n.pos) / static_cast<double>(n.pos + n.neg);
  }

  std::size_t depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].leaf()) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  bool operator==(const DecisionTree&) const = default;
};

struct GrowOptions {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 1;   // minimum instances on each side of a split
  std::size_t features_per_split = 0;  // 0 = every feature, in schema order
  Rng* rng = nullptr;                  // required when features are sampled
};

namespace detail {

inline double entropy(double pos, double neg) {
  const double n = pos + neg;
  double h = 0.0;
  if (pos > 0) h -= pos / n * std::log2(pos / n);
  if (neg > 0) h -= neg / n * std::log2(neg / n);
  return h;
}

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& m, const GrowOptions& opt) : m_(m), opt_(opt) {
    feature_order_.resize(m.dims);
    std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
  }

  DecisionTree grow(std::vector<std::size_t> sample) {
    DecisionTree tree;
    grow_node(tree, std::move(sample), 0);
    return tree;
  }

 private:
  std::int32_t grow_node(DecisionTree& tree, std::vector<std::size_t> idx, std::size_t depth) {
    const auto self = static_cast<std::int32_t>(tree.nodes.size());
    TreeNode node;
    for (auto i : idx) (m_.positive(i) ? node.pos : node.neg)++;
    tree.nodes.push_back(node);

    const bool pure = node.pos == 0 || node.neg == 0;
    const bool depth_capped = opt_.max_depth != 0 && depth >= opt_.max_depth;
    if (pure || depth_capped || idx.size() < 2 * opt_.min_leaf) return self;

    const Split split = best_split(idx, node.pos, node.neg);
    if (split.feature < 0) return self;

    std::vector<std::size_t> left, right;
    for (auto i : idx)
      (m_.at(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const auto l = grow_node(tree, std::move(left), depth + 1);
    const auto r = grow_node(tree, std::move(right), depth + 1);
    auto& n = tree.nodes[static_cast<std::size_t>(self)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = l;
    n.right = r;
    return self;
  }

  Split best_split(const std::vector<std::size_t>& idx, std::size_t pos, std::size_t neg) {
    const std::size_t dims = m_.dims;
    const bool sampled = opt_.features_per_split != 0 && opt_.features_per_split < dims;
    if (sampled) {
      // Fresh random order per node; the first features_per_split are the
      // candidates, the rest are fallbacks when none of them can split.
      std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
      for (std::size_t i = 0; i + 1 < dims; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(*opt_.rng, dims - i));
        std::swap(feature_order_[i], feature_order_[j]);
      }
    }
    const double parent = entropy(static_cast<double>(pos), static_cast<double>(neg));
    const std::size_t batch = sampled ? opt_.features_per_split : dims;
    Split best;
    for (std::size_t start = 0; start < dims; start += batch) {
      for (std::size_t f = start; f < std::min(dims, start + batch); ++f)
        evaluate_feature(feature_order_[f], idx, pos, neg, parent, best);
      if (best.feature >= 0) break;
    }
    return best;
  }

  void evaluate_feature(std::size_t feature, const std::vector<std::size_t>& idx, std::size_t pos, std::size_t neg,
                        double parent, Split& best) {
    buf_.clear();
    for (auto i : idx) buf_.push_back({m_.at(i, feature), m_.positive(i)});
    std::sort(buf_.begin(), buf_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (buf_.front().first == buf_.back().first) return;

    const double n = static_cast<double>(idx.size());
    std::size_t lpos = 0, lneg = 0;
    for (std::size_t i = 0; i + 1 < buf_.size(); ++i) {
      (buf_[i].second ? lpos : lneg)++;
      if (buf_[i].first == buf_[i + 1].first) continue;
      const std::size_t nl = i + 1, nr = buf_.size() - nl;
      if (nl < opt_.min_leaf || nr < opt_.min_leaf) continue;
      const double hl = entropy(static_cast<double>(lpos), static_cast<double>(lneg));
      const double hr = entropy(static_cast<double>(pos - lpos), static_cast<double>(neg - lneg));
      const double gain = parent - (static_cast<double>(nl) * hl + static_cast<double>(nr) * hr) / n;
      if (gain > best.gain + 1e-12) {
        best.feature = static_cast<std::int32_t>(feature);
        best.threshold = midpoint_cut(buf_[i].first, buf_[i + 1].first);
        best.gain = gain;
      }
    }
  }

  const Matrix& m_;
  GrowOptions opt_;
  std::vector<std::size_t> feature_order_;
  std::vector<std::pair<double, bool>> buf_;
};

}  // namespace detail

/// Grows a tree on `sample` (row indices; repeats allowed) by maximum
/// information gain over midpoint thresholds. Ties keep the first candidate
/// (evaluation order, then lowest threshold).
inline DecisionTree grow_tree(const Matrix& m, std::vector<std::size_t> sample, const GrowOptions& opt) {
  detail::TreeGrower g(m, opt);
  return g.grow(std::move(sample));
}

/// Misclassified rows of `rows` when `tree` predicts by strict majority (> 0.5).
inline std::size_t tree_errors(const DecisionTree& tree, const Matrix& m, std::span<const std::size_t> rows) {
  std::size_t errors = 0;
  for (auto i : rows) {
    const auto& n = tree.nodes[tree.leaf_index(m.row(i))];
    errors += majority(n.pos, n.neg) != m.labels[i] ? 1 : 0;
  }
  return errors;
}

namespace detail {

inline std::size_t prune_node(DecisionTree& tree, std::size_t node, const Matrix& m, std::vector<std::size_t> rows) {
  auto& n = tree.nodes[node];
  const ClassLabel as_leaf = majority(n.pos, n.neg);
  std::size_t leaf_errors = 0;
  for (auto i : rows) leaf_errors += m.labels[i] != as_leaf ? 1 : 0;
  if (n.leaf()) return leaf_errors;

  std::vector<std::size_t> left, right;
  const auto f = static_cast<std::size_t>(n.feature);
  for (auto i : rows) (m.at(i, f) <= n.threshold ? left : right).push_back(i);
  rows.clear();
  const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);
  const std::size_t subtree_errors = prune_node(tree, l, m, std::move(left)) + prune_node(tree, r, m, std::move(right));
  auto& self = tree.nodes[node];
  if (leaf_errors <= subtree_errors) {
    self.feature = -1;
    self.left = self.right = -1;
    self.threshold = 0.0;
    return leaf_errors;
  }
  return subtree_errors;
}

inline std::int32_t copy_reachable(const DecisionTree& from, std::size_t node, DecisionTree& to) {
  const auto self = static_cast<std::int32_t>(to.nodes.size());
  to.nodes.push_back(from.nodes[node]);
  if (!from.nodes[node].leaf()) {
    const auto l = copy_reachable(from, static_cast<std::size_t>(from.nodes[node].left), to);
    const auto r = copy_reachable(from, static_cast<std::size_t>(from.nodes[node].right), to);
    to.nodes[static_cast<std::size_t>(self)].left = l;
    to.nodes[static_cast<std::size_t>(self)].right = r;
  }
  return self;
}

}  // namespace detail

/// Bottom-up reduced-error pruning: a subtree becomes a leaf whenever that
/// does not increase the error on the `prune_rows` reaching it.
inline DecisionTree reduced_error_prune(DecisionTree tree, const Matrix& m, std::span<const std::size_t> prune_rows) {
  detail::prune_node(tree, 0, m, std::vector<std::size_t>(prune_rows.begin(), prune_rows.end()));
  DecisionTree compact;
  compact.nodes.reserve(tree.nodes.size());
  detail::copy_reachable(tree, 0, compact);
  return compact;
}

}  // namespace cred
