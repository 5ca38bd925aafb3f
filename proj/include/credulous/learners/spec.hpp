#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "credulous/error.hpp"

namespace cred {

enum class Algorithm { OneR, NaiveBayes, Knn, RepTree, RandomForest };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::OneR: return "one_r";
    case Algorithm::NaiveBayes: return "naive_bayes";
    case Algorithm::Knn: return "knn";
    case Algorithm::RepTree: return "rep_tree";
    case Algorithm::RandomForest: return "random_forest";
  }
  return "";
}

// Short names used in rendered tables.
inline std::string_view algorithm_label(Algorithm a) {
  switch (a) {
    case Algorithm::OneR: return "1R";
    case Algorithm::NaiveBayes: return "NB";
    case Algorithm::Knn: return "IBk";
    case Algorithm::RepTree: return "REP";
    case Algorithm::RandomForest: return "RF";
  }
  return "";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::OneR, Algorithm::NaiveBayes, Algorithm::Knn, Algorithm::RepTree, Algorithm::RandomForest})
    if (algorithm_name(a) == name || algorithm_label(a) == name) return a;
  return std::nullopt;
}

using Hyperparameters = std::map<std::string, double>;

/// Defaults for every hyperparameter an algorithm accepts. For the forest,
/// features_per_split = 0 means ceil(sqrt(dims)).
inline Hyperparameters default_hyperparameters(Algorithm a) {
  switch (a) {
    case Algorithm::OneR: return {{"min_bucket", 6}};
    case Algorithm::NaiveBayes: return {{"variance_floor", 1e-9}};
    case Algorithm::Knn: return {{"k", 1}};
    case Algorithm::RepTree: return {{"grow_fraction", 0.75}, {"max_depth", 30}, {"min_leaf", 2}};
    case Algorithm::RandomForest:
      return {{"n_trees", 100}, {"features_per_split", 0}, {"min_leaf", 1}, {"bootstrap", 1}};
  }
  return {};
}

struct LearnerSpec {
  Algorithm algorithm = Algorithm::OneR;
  Hyperparameters hyperparameters = default_hyperparameters(Algorithm::OneR);
  std::uint64_t seed = 0;

  double param(const std::string& name) const {
    const auto it = hyperparameters.find(name);
    if (it == hyperparameters.end()) throw Error("unknown_hyperparameter", name);
    return it->second;
  }
  std::size_t count_param(const std::string& name) const { return static_cast<std::size_t>(param(name)); }

  bool operator==(const LearnerSpec&) const = default;
};

/// Validated spec: defaults filled in, unknown names and out-of-range values
/// rejected with ConfigError.
inline LearnerSpec make_learner_spec(Algorithm a, const Hyperparameters& overrides = {}, std::uint64_t seed = 0) {
  LearnerSpec spec{a, default_hyperparameters(a), seed};
  for (const auto& [name, value] : overrides) {
    const auto it = spec.hyperparameters.find(name);
    if (it == spec.hyperparameters.end())
      throw ConfigError("unknown_hyperparameter",
                        std::string(algorithm_name(a)) + " does not accept '" + name + "'");
    it->second = value;
  }
  auto require = [&](const char* name, bool ok, const char* what) {
    if (!ok) throw ConfigError("invalid_hyperparameter", std::string(name) + " must be " + what);
  };
  auto integral_at_least = [&](const char* name, double lo) {
    const double v = spec.param(name);
    require(name, std::isfinite(v) && v == std::floor(v) && v >= lo, lo > 0 ? "a positive integer" : "a non-negative integer");
  };
  switch (a) {
    case Algorithm::OneR: integral_at_least("min_bucket", 1); break;
    case Algorithm::NaiveBayes: {
      const double v = spec.param("variance_floor");
      require("variance_floor", std::isfinite(v) && v > 0, "positive");
      break;
    }
    case Algorithm::Knn: integral_at_least("k", 1); break;
    case Algorithm::RepTree: {
      const double g = spec.param("grow_fraction");
      require("grow_fraction", g > 0 && g < 1, "in (0, 1)");
      integral_at_least("max_depth", 1);
      integral_at_least("min_leaf", 1);
      break;
    }
    case Algorithm::RandomForest: {
      integral_at_least("n_trees", 1);
      integral_at_least("features_per_split", 0);
      integral_at_least("min_leaf", 1);
      const double b = spec.param("bootstrap");
      require("bootstrap", b == 0 || b == 1, "0 or 1");
      break;
    }
  }
  return spec;
}

}  // namespace cred
