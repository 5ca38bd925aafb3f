#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/learners/tree.hpp"

namespace cred {

/// Single-feature rule: bucket i covers (cuts[i-1], cuts[i]] and predicts classes[i].
struct OneRRule {
  std::size_t feature = 0;
  std::string feature_name;
  std::vector<double> cuts;
  std::vector<ClassLabel> classes;
  std::size_t training_errors = 0;

  ClassLabel classify(double x) const {
    const auto it = std::lower_bound(cuts.begin(), cuts.end(), x);
    return classes[static_cast<std::size_t>(it - cuts.begin())];
  }

  bool operator==(const OneRRule&) const = default;
};

struct OneRModel {
  OneRRule rule;

  double score(std::span<const double> x) const {
    return rule.classify(x[rule.feature]) == ClassLabel::Positive ? 1.0 : 0.0;
  }
  bool operator==(const OneRModel&) const = default;
};

/// Discretizes one feature: buckets grow over runs of equal values, left to
/// right, and close once their majority class holds min_bucket instances and
/// the next run is not purely of that class; adjacent buckets with the same
/// class are then merged.
inline OneRRule one_r_rule_for_feature(const Matrix& m, std::size_t feature, std::size_t min_bucket) {
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) sorted.push_back({m.at(i, feature), m.positive(i)});
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  struct Bucket {
    double lo, hi;
    std::size_t pos = 0, neg = 0;
  };
  // Runs of equal values, each with its class counts.
  struct Run {
    double value;
    std::size_t pos = 0, neg = 0;
  };
  std::vector<Run> runs;
  for (const auto& [v, p] : sorted) {
    if (runs.empty() || runs.back().value != v) runs.push_back({v});
    (p ? runs.back().pos : runs.back().neg)++;
  }

  std::vector<Bucket> buckets;
  bool open = false;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!open) {
      buckets.push_back({runs[r].value, runs[r].value});
      open = true;
    }
    auto& b = buckets.back();
    b.hi = runs[r].value;
    b.pos += runs[r].pos;
    b.neg += runs[r].neg;
    if (std::max(b.pos, b.neg) < min_bucket) continue;
    // A full bucket still absorbs following runs made only of its majority class.
    const bool next_pure = r + 1 < runs.size() &&
                           (majority(b.pos, b.neg) == ClassLabel::Positive ? runs[r + 1].neg == 0 : runs[r + 1].pos == 0);
    if (!next_pure) open = false;
  }

  OneRRule rule;
  rule.feature = feature;
  std::vector<Bucket> merged;
  for (const auto& b : buckets) {
    if (!merged.empty() && majority(merged.back().pos, merged.back().neg) == majority(b.pos, b.neg)) {
      merged.back().hi = b.hi;
      merged.back().pos += b.pos;
      merged.back().neg += b.neg;
    } else {
      merged.push_back(b);
    }
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto cls = majority(merged[i].pos, merged[i].neg);
    rule.classes.push_back(cls);
    rule.training_errors += cls == ClassLabel::Positive ? merged[i].neg : merged[i].pos;
    if (i + 1 < merged.size()) rule.cuts.push_back(midpoint_cut(merged[i].hi, merged[i + 1].lo));
  }
  return rule;
}

inline void require_both_classes(const Dataset& d) {
  const auto c = dataset_class_counts(d);
  if (c.positives == 0 || c.negatives == 0)
    throw Error("degenerate_labels", "training data needs at least one instance of each class");
}

/// Picks the feature whose rule has the fewest training errors; ties go to
/// the earliest feature in schema order.
inline OneRModel fit_one_r_model(const Dataset& d, std::size_t min_bucket = 6) {
  require_both_classes(d);
  if (d.schema.size() == 0) throw Error("empty_schema", "1R needs at least one feature");
  const Matrix m = to_matrix(d);
  OneRModel model;
  for (std::size_t f = 0; f < m.dims; ++f) {
    auto rule = one_r_rule_for_feature(m, f, min_bucket);
    if (f == 0 || rule.training_errors < model.rule.training_errors) model.rule = std::move(rule);
  }
  model.rule.feature_name = d.schema.feature_names[model.rule.feature];
  return model;
}

}  // namespace cred
