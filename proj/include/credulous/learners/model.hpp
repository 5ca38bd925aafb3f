#pragma once

#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/features.hpp"
#include "credulous/learners/knn.hpp"
#include "credulous/learners/naive_bayes.hpp"
#include "credulous/learners/one_r.hpp"
#include "credulous/learners/random_forest.hpp"
#include "credulous/learners/rep_tree.hpp"
#include "credulous/learners/spec.hpp"

namespace cred {

inline constexpr double kDecisionThreshold = 0.5;

using ModelPayload = std::variant<OneRModel, NaiveBayesModel, KnnModel, RepTreeModel, ForestModel>;

struct TrainedModel {
  LearnerSpec spec;
  FeatureSchema schema;
  ModelPayload payload;

  /// Higher means more POSITIVE. Vectors of another schema are rejected.
  double score(const FeatureVector& v) const {
    if (v.schema_id != schema.schema_id)
      throw Error("schema_mismatch", "model expects " + schema.schema_id + ", got " + v.schema_id);
    if (v.values.size() != schema.size()) throw Error("schema_mismatch", "vector length differs from schema");
    return score_values(v.values);
  }

  ClassLabel predict(const FeatureVector& v) const {
    return score(v) > kDecisionThreshold ? ClassLabel::Positive : ClassLabel::Negative;
  }

  double score_values(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.score(x); }, payload);
  }

  bool operator==(const TrainedModel&) const = default;
};

struct FitOptions {
  std::size_t workers = 1;
};

inline TrainedModel fit(const LearnerSpec& spec, const Dataset& d, const FitOptions& opt = {}) {
  TrainedModel model{spec, d.schema, OneRModel{}};
  switch (spec.algorithm) {
    case Algorithm::OneR:
      model.payload = fit_one_r_model(d, spec.count_param("min_bucket"));
      break;
    case Algorithm::NaiveBayes:
      model.payload = fit_naive_bayes_model(d, spec.param("variance_floor"));
      break;
    case Algorithm::Knn:
      model.payload = fit_knn_model(d, spec.count_param("k"));
      break;
    case Algorithm::RepTree:
      model.payload = fit_rep_tree_model(d, spec.param("grow_fraction"), spec.count_param("max_depth"),
                                         spec.count_param("min_leaf"), spec.seed);
      break;
    case Algorithm::RandomForest: {
      ForestOptions f;
      f.n_trees = spec.count_param("n_trees");
      f.features_per_split = spec.count_param("features_per_split");
      f.min_leaf = spec.count_param("min_leaf");
      f.bootstrap = spec.param("bootstrap") != 0.0;
      f.seed = spec.seed;
      f.workers = opt.workers;
      model.payload = fit_forest_model(d, f);
      break;
    }
  }
  return model;
}

inline TrainedModel fit_one_r(const Dataset& d, std::size_t min_bucket = 6) {
  return fit(make_learner_spec(Algorithm::OneR, {{"min_bucket", static_cast<double>(min_bucket)}}), d);
}

inline TrainedModel fit_naive_bayes(const Dataset& d, double variance_floor = 1e-9) {
  return fit(make_learner_spec(Algorithm::NaiveBayes, {{"variance_floor", variance_floor}}), d);
}

inline TrainedModel fit_knn(const Dataset& d, std::size_t k = 1) {
  return fit(make_learner_spec(Algorithm::Knn, {{"k", static_cast<double>(k)}}), d);
}

inline TrainedModel fit_rep_tree(const Dataset& d, std::uint64_t seed, double grow_fraction = 0.75,
                                 std::size_t max_depth = 30, std::size_t min_leaf = 2) {
  return fit(make_learner_spec(Algorithm::RepTree,
                               {{"grow_fraction", grow_fraction},
                                {"max_depth", static_cast<double>(max_depth)},
                                {"min_leaf", static_cast<double>(min_leaf)}},
                               seed),
             d);
}

inline TrainedModel fit_random_forest(const Dataset& d, std::uint64_t seed, std::size_t n_trees = 100,
                                      std::size_t features_per_split = 0, std::size_t min_leaf = 1,
                                      std::size_t workers = 1) {
  return fit(make_learner_spec(Algorithm::RandomForest,
                               {{"n_trees", static_cast<double>(n_trees)},
                                {"features_per_split", static_cast<double>(features_per_split)},
                                {"min_leaf", static_cast<double>(min_leaf)}},
                               seed),
             d, FitOptions{workers});
}

// ---------------------------------------------------------------------------
// Model file: JSON document tagged with a format name and version.
// ---------------------------------------------------------------------------

inline constexpr const char* kModelFormat = "credulous-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline nlohmann::json label_to_json(ClassLabel l) { return l == ClassLabel::Positive ? 1 : 0; }
inline ClassLabel label_from_json(const nlohmann::json& j) {
  return j.get<int>() != 0 ? ClassLabel::Positive : ClassLabel::Negative;
}

inline nlohmann::json tree_to_json(const DecisionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.pos, n.neg});
  return nodes;
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree t;
  for (const auto& n : j)
    t.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(),
                       n.at(3).get<std::int32_t>(), n.at(4).get<std::uint32_t>(), n.at(5).get<std::uint32_t>()});
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (!n.leaf() && (n.left <= static_cast<std::int32_t>(i) || n.right <= static_cast<std::int32_t>(i) ||
                      n.left >= static_cast<std::int32_t>(t.nodes.size()) ||
                      n.right >= static_cast<std::int32_t>(t.nodes.size())))
      throw Error("bad_model_file", "tree node " + std::to_string(i) + " has invalid children");
  }
  if (t.nodes.empty()) throw Error("bad_model_file", "empty tree");
  return t;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json labels = nlohmann::json::array();
  for (auto l : m.labels) labels.push_back(label_to_json(l));
  return {{"rows", m.rows}, {"dims", m.dims}, {"values", m.values}, {"labels", labels}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m;
  j.at("rows").get_to(m.rows);
  j.at("dims").get_to(m.dims);
  j.at("values").get_to(m.values);
  for (const auto& l : j.at("labels")) m.labels.push_back(label_from_json(l));
  if (m.values.size() != m.rows * m.dims || m.labels.size() != m.rows)
    throw Error("bad_model_file", "matrix shape mismatch");
  return m;
}

inline nlohmann::json payload_to_json(const ModelPayload& p) {
  return std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, OneRModel>) {
          nlohmann::json classes = nlohmann::json::array();
          for (auto c : m.rule.classes) classes.push_back(label_to_json(c));
          return {{"feature", m.rule.feature},
                  {"feature_name", m.rule.feature_name},
                  {"cuts", m.rule.cuts},
                  {"classes", classes},
                  {"training_errors", m.rule.training_errors}};
        } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          return {{"log_prior", m.log_prior}, {"mean", m.mean}, {"variance", m.variance}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return {{"k", m.k},
                  {"mean", m.table.mean},
                  {"stddev", m.table.stddev},
                  {"train", matrix_to_json(m.train)},
                  {"ids", m.ids}};
        } else if constexpr (std::is_same_v<T, RepTreeModel>) {
          return {{"tree", tree_to_json(m.tree)}};
        } else {
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        }
      },
      p);
}

inline ModelPayload payload_from_json(Algorithm a, const nlohmann::json& j, std::size_t dims) {
  switch (a) {
    case Algorithm::OneR: {
      OneRModel m;
      j.at("feature").get_to(m.rule.feature);
      j.at("feature_name").get_to(m.rule.feature_name);
      j.at("cuts").get_to(m.rule.cuts);
      for (const auto& c : j.at("classes")) m.rule.classes.push_back(label_from_json(c));
      j.at("training_errors").get_to(m.rule.training_errors);
      if (m.rule.feature >= dims || m.rule.classes.size() != m.rule.cuts.size() + 1)
        throw Error("bad_model_file", "inconsistent 1R rule");
      return m;
    }
    case Algorithm::NaiveBayes: {
      NaiveBayesModel m;
      j.at("log_prior").get_to(m.log_prior);
      j.at("mean").get_to(m.mean);
      j.at("variance").get_to(m.variance);
      for (std::size_t c = 0; c < 2; ++c)
        if (m.mean[c].size() != dims || m.variance[c].size() != dims)
          throw Error("bad_model_file", "naive Bayes dimension mismatch");
      return m;
    }
    case Algorithm::Knn: {
      KnnModel m;
      j.at("k").get_to(m.k);
      j.at("mean").get_to(m.table.mean);
      j.at("stddev").get_to(m.table.stddev);
      m.train = matrix_from_json(j.at("train"));
      j.at("ids").get_to(m.ids);
      if (m.train.dims != dims || m.ids.size() != m.train.rows || m.k < 1 || m.k > m.train.rows)
        throw Error("bad_model_file", "knn payload mismatch");
      return m;
    }
    case Algorithm::RepTree: return RepTreeModel{tree_from_json(j.at("tree"))};
    case Algorithm::RandomForest: {
      ForestModel m;
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
      if (m.trees.empty()) throw Error("bad_model_file", "forest without trees");
      return m;
    }
  }
  throw Error("bad_model_file", "unknown algorithm");
}

}  // namespace detail

inline std::string serialize_model(const TrainedModel& m) {
  nlohmann::json j = {{"format", kModelFormat},
                      {"version", kModelVersion},
                      {"spec",
                       {{"algorithm", algorithm_name(m.spec.algorithm)},
                        {"hyperparameters", m.spec.hyperparameters},
                        {"seed", m.spec.seed}}},
                      {"schema", {{"schema_id", m.schema.schema_id}, {"feature_names", m.schema.feature_names}}},
                      {"payload", detail::payload_to_json(m.payload)}};
  return j.dump() + "\n";
}

/// Parses a model file. When `expected_schema_id` is non-empty, a model for
/// any other schema is rejected.
inline TrainedModel deserialize_model(std::string_view body, std::string_view expected_schema_id = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const std::exception& e) {
    throw Error("bad_model_file", e.what());
  }
  try {
    if (j.at("format") != kModelFormat) throw Error("bad_model_file", "not a credulous model");
    if (j.at("version").get<int>() != kModelVersion)
      throw Error("unsupported_model_version", std::to_string(j.at("version").get<int>()));
    TrainedModel m;
    const auto& spec = j.at("spec");
    const auto algo = parse_algorithm(spec.at("algorithm").get<std::string>());
    if (!algo) throw Error("bad_model_file", "unknown algorithm");
    m.spec = make_learner_spec(*algo, spec.at("hyperparameters").get<Hyperparameters>(),
                               spec.at("seed").get<std::uint64_t>());
    j.at("schema").at("schema_id").get_to(m.schema.schema_id);
    j.at("schema").at("feature_names").get_to(m.schema.feature_names);
    if (!expected_schema_id.empty() && m.schema.schema_id != expected_schema_id)
      throw Error("schema_mismatch", "model file is for schema " + m.schema.schema_id + ", expected " +
                                         std::string(expected_schema_id));
    m.payload = detail::payload_from_json(*algo, j.at("payload"), m.schema.size());
    return m;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("bad_model_file", e.what());
  }
}

}  // namespace cred
