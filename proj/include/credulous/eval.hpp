#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/learners.hpp"
#include "credulous/random.hpp"
#include "credulous/text.hpp"

namespace cred {

// ---------------------------------------------------------------------------
// Metrics (POSITIVE is the scored class)
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  void add(ClassLabel predicted, ClassLabel actual) {
    const bool p = predicted == ClassLabel::Positive, a = actual == ClassLabel::Positive;
    (p ? (a ? tp : fp) : (a ? fn : tn))++;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double accuracy_percent = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Metrics&) const = default;
};

/// precision = 1 when nothing is predicted POSITIVE, recall = 1 when nothing
/// is actually POSITIVE, f1 = 0 when precision + recall = 0.
inline Metrics metrics_from_confusion(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error("empty_confusion", "confusion matrix has no entries");
  Metrics r;
  r.accuracy_percent = 100.0 * static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  r.precision = m.tp + m.fp == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  r.recall = m.tp + m.fn == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct ScoredLabel {
  double score = 0.0;
  ClassLabel label = ClassLabel::Negative;
};

/// Mann-Whitney form of the ROC area: P(score_pos > score_neg) with ties
/// counted one half, computed from mid-ranks.
inline double auc_roc(std::span<const ScoredLabel> scored) {
  std::vector<ScoredLabel> s(scored.begin(), scored.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  double n_pos = 0, n_neg = 0, pos_rank_sum = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j].score == s[i].score) ++j;
    // ranks i+1..j share the mid-rank (i+1+j)/2
    const double mid_rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (s[t].label == ClassLabel::Positive) {
        n_pos += 1;
        pos_rank_sum += mid_rank;
      } else {
        n_neg += 1;
      }
    }
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw Error("single_class_auc", "AUC needs both classes");
  return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

// ---------------------------------------------------------------------------
// Stratified folds
// ---------------------------------------------------------------------------

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // per instance, in [0, k)

  std::vector<std::size_t> members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }
  bool operator==(const FoldAssignment&) const = default;
};

/// Seeded shuffle within each class, then round-robin dealing. The dealer
/// continues from where the previous class stopped so fold sizes stay even.
inline FoldAssignment stratified_folds(const Dataset& d, std::size_t k = 10, std::uint64_t seed = 0) {
  if (k < 2) throw Error("invalid_k", "k must be >= 2");
  const auto counts = dataset_class_counts(d);
  if (counts.positives < k || counts.negatives < k)
    throw Error("insufficient_class_for_k", "each class needs at least k = " + std::to_string(k) +
                                                " instances (have " + std::to_string(counts.positives) + " positive, " +
                                                std::to_string(counts.negatives) + " negative)");
  Rng rng(seed);
  FoldAssignment a{k, std::vector<std::size_t>(d.size(), 0)};
  std::size_t dealer = 0;
  for (auto cls : {ClassLabel::Positive, ClassLabel::Negative}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.instances[i].label == cls) rows.push_back(i);
    shuffle(std::span<std::size_t>(rows), rng);
    for (auto r : rows) a.fold_of[r] = dealer++ % k;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 5> kMetricNames{"accuracy", "precision", "recall", "f1", "auc"};

struct FoldMetrics {
  double accuracy_percent = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;

  std::array<double, 5> as_array() const { return {accuracy_percent, precision, recall, f1, auc}; }
  static FoldMetrics from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
  bool operator==(const FoldMetrics&) const = default;
};

struct EvalReport {
  std::string learner;      // algorithm name
  std::string feature_set;  // schema id
  std::size_t k = 0;
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  FoldMetrics stddev;  // population

  bool operator==(const EvalReport&) const = default;
};

/// Mean and population standard deviation of each metric over `runs`.
inline std::pair<FoldMetrics, FoldMetrics> summarize(std::span<const FoldMetrics> runs) {
  if (runs.empty()) throw Error("empty_runs", "nothing to summarize");
  std::array<double, 5> mean{}, var{};
  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    const auto a = r.as_array();
    for (std::size_t i = 0; i < 5; ++i) mean[i] += a[i];
  }
  for (auto& m : mean) m /= n;
  for (const auto& r : runs) {
    const auto a = r.as_array();
    for (std::size_t i = 0; i < 5; ++i) var[i] += (a[i] - mean[i]) * (a[i] - mean[i]);
  }
  for (auto& v : var) v = std::sqrt(v / n);
  return {FoldMetrics::from_array(mean), FoldMetrics::from_array(var)};
}

inline text::KeyValues report_key_values(const EvalReport& r, const std::string& prefix = "") {
  text::KeyValues kv{{prefix + "learner", r.learner},
                     {prefix + "feature_set", r.feature_set},
                     {prefix + "k", std::to_string(r.k)},
                     {prefix + "folds", std::to_string(r.folds.size())}};
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const auto a = r.folds[f].as_array();
    for (std::size_t i = 0; i < 5; ++i)
      kv.emplace_back(prefix + "fold." + std::to_string(f) + "." + kMetricNames[i], text::format_real(a[i]));
  }
  const auto m = r.mean.as_array(), s = r.stddev.as_array();
  for (std::size_t i = 0; i < 5; ++i) kv.emplace_back(prefix + "mean." + kMetricNames[i], text::format_real(m[i]));
  for (std::size_t i = 0; i < 5; ++i) kv.emplace_back(prefix + "stddev." + kMetricNames[i], text::format_real(s[i]));
  return kv;
}

/// Inverse of report_key_values for the entries under `prefix`.
inline EvalReport report_from_key_values(const text::KeyValues& kv, const std::string& prefix = "") {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : kv)
    if (k.rfind(prefix, 0) == 0) m[k.substr(prefix.size())] = v;
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = m.find(key);
    if (it == m.end()) throw Error("bad_report", "missing key " + prefix + key);
    return it->second;
  };
  auto real = [&](const std::string& key) {
    const auto v = text::parse_real(get(key));
    if (!v) throw Error("bad_report", "not a number: " + prefix + key);
    return *v;
  };
  auto metrics = [&](const std::string& stem) {
    std::array<double, 5> a{};
    for (std::size_t i = 0; i < 5; ++i) a[i] = real(stem + kMetricNames[i]);
    return FoldMetrics::from_array(a);
  };
  EvalReport r;
  r.learner = get("learner");
  r.feature_set = get("feature_set");
  r.k = static_cast<std::size_t>(real("k"));
  const auto folds = static_cast<std::size_t>(real("folds"));
  for (std::size_t f = 0; f < folds; ++f) r.folds.push_back(metrics("fold." + std::to_string(f) + "."));
  r.mean = metrics("mean.");
  r.stddev = metrics("stddev.");
  return r;
}

// ---------------------------------------------------------------------------
// Cross-validation and tuning
// ---------------------------------------------------------------------------

struct CvOptions {
  std::size_t workers = 1;
  // Called once per fold, before training, with the exact train/test split.
  std::function<void(std::size_t fold, const Dataset& train, const Dataset& test)> on_fold;
};

/// Fit on `train`, score every test instance.
inline FoldMetrics evaluate_split(const LearnerSpec& spec, const Dataset& train, const Dataset& test) {
  const auto model = fit(spec, train);
  ConfusionMatrix cm;
  std::vector<ScoredLabel> scored;
  scored.reserve(test.size());
  for (const auto& inst : test.instances) {
    const double s = model.score(inst.features);
    cm.add(s > kDecisionThreshold ? ClassLabel::Positive : ClassLabel::Negative, inst.label);
    scored.push_back({s, inst.label});
  }
  const auto m = metrics_from_confusion(cm);
  return {m.accuracy_percent, m.precision, m.recall, m.f1, auc_roc(scored)};
}

/// Runs `jobs(i)` for i in [0, n) on up to `workers` threads.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline EvalReport cross_validate(const LearnerSpec& spec, const Dataset& d, std::size_t k = 10, std::uint64_t seed = 0,
                                 const CvOptions& opt = {}) {
  const auto folds = stratified_folds(d, k, seed);
  std::vector<Dataset> trains(k), tests(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < d.size(); ++i) (folds.fold_of[i] == f ? test_rows : train_rows).push_back(i);
    trains[f] = subset(d, train_rows);
    tests[f] = subset(d, test_rows);
    if (opt.on_fold) opt.on_fold(f, trains[f], tests[f]);
  }
  EvalReport r;
  r.learner = std::string(algorithm_name(spec.algorithm));
  r.feature_set = d.schema.schema_id;
  r.k = k;
  r.folds.resize(k);
  parallel_for(k, opt.workers, [&](std::size_t f) { r.folds[f] = evaluate_split(spec, trains[f], tests[f]); });
  std::tie(r.mean, r.stddev) = summarize(r.folds);
  return r;
}

using HyperparameterGrid = std::map<std::string, std::vector<double>>;

/// Every grid point, parameter names in lexicographic order with the first
/// name varying slowest, values in list order.
inline std::vector<Hyperparameters> enumerate_grid(const HyperparameterGrid& grid) {
  if (grid.empty()) throw ConfigError("empty_grid", "grid has no parameters");
  for (const auto& [name, values] : grid)
    if (values.empty()) throw ConfigError("empty_grid", "parameter " + name + " has no values");
  std::vector<Hyperparameters> points{{}};
  for (const auto& [name, values] : grid) {
    std::vector<Hyperparameters> next;
    for (const auto& p : points)
      for (double v : values) {
        auto q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  return points;
}

struct GridResult {
  Hyperparameters best;
  EvalReport report;
  std::vector<std::pair<Hyperparameters, EvalReport>> evaluated;
};

/// Highest mean accuracy wins; ties keep the earliest point.
inline GridResult grid_search(Algorithm algorithm, const HyperparameterGrid& grid, const Dataset& d, std::size_t k,
                              std::uint64_t seed, const Hyperparameters& base = {}, const CvOptions& opt = {}) {
  GridResult out;
  for (const auto& point : enumerate_grid(grid)) {
    auto params = base;
    for (const auto& [name, v] : point) params[name] = v;
    const auto spec = make_learner_spec(algorithm, params, seed);
    auto report = cross_validate(spec, d, k, seed, opt);
    if (out.evaluated.empty() || report.mean.accuracy_percent > out.report.mean.accuracy_percent) {
      out.best = spec.hyperparameters;
      out.report = report;
    }
    out.evaluated.emplace_back(spec.hyperparameters, std::move(report));
  }
  return out;
}

}  // namespace cred
