#include <gtest/gtest.h>

#include "credulous/learners.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cred;
using testing_support::gaussian_blobs;
using testing_support::make_dataset;

namespace {

FeatureVector vec(const Dataset& d, std::vector<double> values) { return {d.schema.schema_id, std::move(values)}; }

Dataset permuted(const Dataset& d, std::uint64_t seed) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  return subset(d, order);
}

const OneRModel& one_r_of(const TrainedModel& m) { return std::get<OneRModel>(m.payload); }

}  // namespace

// ---------------------------------------------------------------------------
// 1R
// ---------------------------------------------------------------------------

TEST(OneR, PerfectBinaryFeature) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    rows.push_back({static_cast<double>(i % 7), i < 10 ? 1.0 : 0.0});
    labels.push_back(i < 10);
  }
  const auto d = make_dataset(rows, labels);
  const auto model = fit_one_r(d);
  const auto& rule = one_r_of(model).rule;
  EXPECT_EQ(rule.feature, 1u);
  EXPECT_EQ(rule.training_errors, 0u);
  EXPECT_EQ(rule.classify(1.0), ClassLabel::Positive);
  EXPECT_EQ(rule.classify(0.0), ClassLabel::Negative);
}

TEST(OneR, PicksFeatureWithFewestErrors) {
  // Column 1 (A) misplaces one label, column 0 (B) two, under min_bucket 3.
  const std::vector<int> labels{1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
  const std::vector<double> b{1, 3, 5, 2, 10, 4, 6, 7, 8, 9};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < 10; ++i) rows.push_back({b[i], static_cast<double>(i + 1)});
  const auto d = make_dataset(rows, labels);
  ASSERT_EQ(oracle::one_r_errors(d, 0, 3), 2u);
  ASSERT_EQ(oracle::one_r_errors(d, 1, 3), 1u);
  const auto model = fit_one_r(d, 3);
  const auto& rule = one_r_of(model).rule;
  EXPECT_EQ(rule.feature, 1u);
  EXPECT_EQ(rule.training_errors, 1u);
  EXPECT_EQ(rule.feature_name, "f1");
}

TEST(OneR, TieGoesToFirstFeature) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>(i)});
    labels.push_back((i / 3) % 2);
  }
  const auto d = make_dataset(rows, labels);
  EXPECT_EQ(one_r_of(fit_one_r(d)).rule.feature, 0u);
}

TEST(OneR, TrainingErrorsMatchRuleApplication) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = gaussian_blobs(25, 3, 1.0, seed);
    const auto model = fit_one_r(d);
    std::size_t errors = 0;
    for (const auto& inst : d.instances) errors += model.predict(inst.features) != inst.label;
    EXPECT_EQ(errors, one_r_of(model).rule.training_errors);
    EXPECT_EQ(oracle::one_r(d, 6).errors, errors);
  }
}

TEST(OneR, IndependentOfInstanceOrder) {
  const auto d = gaussian_blobs(40, 4, 0.8, 5);
  EXPECT_EQ(one_r_of(fit_one_r(d)), one_r_of(fit_one_r(permuted(d, 9))));
}

TEST(OneR, SingleClassIsRejected) {
  const auto d = make_dataset({{1}, {2}}, {1, 1});
  try {
    fit_one_r(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate_labels");
  }
}

// ---------------------------------------------------------------------------
// Naive Bayes
// ---------------------------------------------------------------------------

TEST(NaiveBayes, SymmetricQueryIsNegative) {
  const auto d = make_dataset({{-1.5}, {-0.5}, {0.5}, {1.5}}, {1, 1, 0, 0});
  const auto model = fit_naive_bayes(d);
  const auto v = vec(d, {0.0});
  EXPECT_DOUBLE_EQ(model.score(v), 0.5);
  EXPECT_EQ(model.predict(v), ClassLabel::Negative);
}

TEST(NaiveBayes, FarQueryMatchesGaussianOracle) {
  const auto d = gaussian_blobs(50, 2, 3.0, 11);
  const auto model = fit_naive_bayes(d);
  const std::vector<double> q{4.0, 4.0};
  const double expected = oracle::gaussian_posterior(d, q);
  EXPECT_GT(expected, 0.99);
  EXPECT_NEAR(model.score(vec(d, q)), expected, 1e-9);
  for (double x : {-1.0, 0.5, 1.5, 2.5}) EXPECT_NEAR(model.score(vec(d, {x, x})), oracle::gaussian_posterior(d, {x, x}), 1e-9);
}

TEST(NaiveBayes, ConstantFeatureGivesPriors) {
  const auto d = make_dataset({{7}, {7}, {7}, {7}, {7}}, {1, 0, 0, 0, 1});
  EXPECT_NEAR(fit_naive_bayes(d).score(vec(d, {7})), 0.4, 1e-12);
}

TEST(NaiveBayes, IndependentOfInstanceOrder) {
  const auto d = gaussian_blobs(40, 3, 1.0, 2);
  EXPECT_EQ(fit_naive_bayes(d), fit_naive_bayes(permuted(d, 4)));
}

// ---------------------------------------------------------------------------
// KNN
// ---------------------------------------------------------------------------

TEST(Knn, ExactMatchTakesLabel) {
  const auto d = make_dataset({{0, 0}, {1, 5}, {3, 2}, {4, 4}}, {1, 0, 1, 0});
  const auto model = fit_knn(d, 1);
  for (const auto& inst : d.instances) EXPECT_EQ(model.predict(inst.features), inst.label);
}

TEST(Knn, MajorityOfThree) {
  const auto d = make_dataset({{0}, {1}, {2}, {10}, {11}}, {1, 1, 0, 0, 0});
  const auto model = fit_knn(d, 3);
  EXPECT_DOUBLE_EQ(model.score(vec(d, {0.5})), 2.0 / 3.0);
  EXPECT_EQ(model.predict(vec(d, {0.5})), ClassLabel::Positive);
}

TEST(Knn, EvenSplitIsNegative) {
  const auto d = make_dataset({{0}, {1}, {10}, {11}}, {1, 0, 0, 1});
  const auto model = fit_knn(d, 2);
  EXPECT_DOUBLE_EQ(model.score(vec(d, {0.5})), 0.5);
  EXPECT_EQ(model.predict(vec(d, {0.5})), ClassLabel::Negative);
}

TEST(Knn, DistanceTieBreaksOnAccountId) {
  // a000 (POSITIVE) and a001 (NEGATIVE) sit at the same distance from 0.
  const auto d = make_dataset({{-1}, {1}, {-5}, {5}}, {1, 0, 0, 0});
  EXPECT_EQ(fit_knn(d, 1).predict(vec(d, {0})), ClassLabel::Positive);
}

TEST(Knn, KLargerThanDataset) {
  const auto d = make_dataset({{0}, {1}}, {1, 0});
  EXPECT_THROW(fit_knn(d, 3), Error);
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

namespace {

// Prune-set accuracy computed straight from leaf counts.
double prune_accuracy(const DecisionTree& t, const Matrix& m, const std::vector<std::size_t>& rows) {
  std::size_t correct = 0;
  for (auto i : rows) {
    std::size_t node = 0;
    while (t.nodes[node].feature >= 0)
      node = static_cast<std::size_t>(m.at(i, static_cast<std::size_t>(t.nodes[node].feature)) <= t.nodes[node].threshold
                                          ? t.nodes[node].left
                                          : t.nodes[node].right);
    const bool positive = t.nodes[node].pos > t.nodes[node].neg;
    correct += positive == m.positive(i);
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

// x = 1..20 grow rows, POSITIVE above 10, plus a POSITIVE noise row at x = 5.
Matrix noisy_line(const std::vector<std::pair<double, int>>& prune_rows) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int x = 1; x <= 20; ++x) {
    rows.push_back({static_cast<double>(x)});
    labels.push_back(x > 10 || x == 5);
  }
  for (const auto& [x, y] : prune_rows) {
    rows.push_back({x});
    labels.push_back(y);
  }
  return to_matrix(make_dataset(rows, labels));
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v(hi - lo);
  std::iota(v.begin(), v.end(), lo);
  return v;
}

}  // namespace

TEST(RepTree, SeparableDataGivesStump) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(i >= 20);
  }
  const auto d = make_dataset(rows, labels);
  const auto model = fit_rep_tree(d, 3);
  const auto& tree = std::get<RepTreeModel>(model.payload).tree;
  EXPECT_EQ(tree.depth(), 1u);
  EXPECT_EQ(tree.nodes.size(), 3u);

  const Matrix m = to_matrix(d);
  const auto grown = grow_tree(m, range(0, 40), {});
  EXPECT_EQ(reduced_error_prune(grown, m, range(0, 40)), grown);
}

TEST(RepTree, NoiseSubtreeIsPrunedWhenItHurts) {
  const Matrix m = noisy_line({{2, 0}, {5, 0}, {8, 0}, {12, 1}, {15, 1}, {18, 1}});
  const auto grow = range(0, 20), prune = range(20, 26);
  const auto grown = grow_tree(m, grow, {});
  ASSERT_GT(grown.depth(), 1u);
  const auto pruned = reduced_error_prune(grown, m, prune);
  EXPECT_EQ(pruned.depth(), 1u);
  EXPECT_LT(prune_accuracy(grown, m, prune), 1.0);
  EXPECT_EQ(prune_accuracy(pruned, m, prune), 1.0);
}

TEST(RepTree, NoiseSubtreeIsPrunedOnEqualAccuracy) {
  const Matrix m = noisy_line({{2, 0}, {8, 0}, {12, 1}, {18, 1}});
  const auto grow = range(0, 20), prune = range(20, 24);
  const auto grown = grow_tree(m, grow, {});
  const auto pruned = reduced_error_prune(grown, m, prune);
  EXPECT_EQ(prune_accuracy(grown, m, prune), prune_accuracy(pruned, m, prune));
  EXPECT_EQ(pruned.depth(), 1u);
}

TEST(RepTree, UsefulSubtreeSurvives) {
  // The prune set confirms the x = 5 pocket, so the subtree must stay.
  const Matrix m = noisy_line({{5, 1}, {5.2, 1}, {2, 0}, {12, 1}});
  const auto pruned = reduced_error_prune(grow_tree(m, range(0, 20), {}), m, range(20, 24));
  EXPECT_GT(pruned.depth(), 1u);
}

TEST(RepTree, PureLeavesScoreZeroOrOne) {
  const auto d = gaussian_blobs(60, 2, 4.0, 8);
  const auto model = fit_rep_tree(d, 1);
  for (const auto& n : std::get<RepTreeModel>(model.payload).tree.nodes)
    if (n.leaf() && (n.pos == 0 || n.neg == 0)) {
      const double s = static_cast<double>(n.pos) / static_cast<double>(n.pos + n.neg);
      EXPECT_TRUE(s == 0.0 || s == 1.0);
    }
}

TEST(RepTree, GrowPruneSplitIsStratified) {
  const auto d = gaussian_blobs(40, 1, 1.0, 3);
  const Matrix m = to_matrix(d);
  const auto split = stratified_grow_prune_split(m, 0.75, 7);
  EXPECT_EQ(split.grow.size(), 60u);
  EXPECT_EQ(split.prune.size(), 20u);
  std::size_t pos = 0;
  for (auto i : split.grow) pos += m.positive(i);
  EXPECT_EQ(pos, 30u);
}

TEST(RandomForest, SingleUnbaggedTreeIsAFullTree) {
  const auto d = gaussian_blobs(30, 3, 1.0, 4);
  const auto model = fit(make_learner_spec(Algorithm::RandomForest,
                                           {{"n_trees", 1}, {"features_per_split", 3}, {"bootstrap", 0}}, 99),
                         d);
  const auto& forest = std::get<ForestModel>(model.payload);
  ASSERT_EQ(forest.trees.size(), 1u);
  EXPECT_EQ(forest.trees[0], grow_tree(to_matrix(d), range(0, d.size()), {}));
}

TEST(RandomForest, SameSeedSamePredictions) {
  const auto d = gaussian_blobs(50, 5, 1.0, 6);
  const auto a = fit_random_forest(d, 17, 25);
  const auto b = fit_random_forest(d, 17, 25, 0, 1, 3);
  EXPECT_EQ(a, b);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = 3 * standard_normal(rng);
    EXPECT_EQ(a.score(vec(d, x)), b.score(vec(d, x)));
  }
  EXPECT_NE(a, fit_random_forest(d, 18, 25));
}

TEST(RandomForest, SeparableBlobs) {
  const auto d = gaussian_blobs(500, 2, 5.0, 21);
  ASSERT_GE(oracle::nearest_centroid_accuracy(d), 0.99);
  const auto model = fit_random_forest(d, 5);
  std::size_t correct = 0;
  for (const auto& inst : d.instances) correct += model.predict(inst.features) == inst.label;
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(d.size()), 0.99);
}

// ---------------------------------------------------------------------------
// Specs and model files
// ---------------------------------------------------------------------------

TEST(LearnerSpec, ValidatesHyperparameters) {
  EXPECT_THROW(make_learner_spec(Algorithm::Knn, {{"depth", 2}}), ConfigError);
  EXPECT_THROW(make_learner_spec(Algorithm::Knn, {{"k", 0}}), ConfigError);
  EXPECT_THROW(make_learner_spec(Algorithm::Knn, {{"k", 1.5}}), ConfigError);
  EXPECT_THROW(make_learner_spec(Algorithm::RepTree, {{"grow_fraction", 1.0}}), ConfigError);
  EXPECT_EQ(make_learner_spec(Algorithm::RandomForest).param("n_trees"), 100.0);
  EXPECT_EQ(parse_algorithm("IBk"), Algorithm::Knn);
  EXPECT_EQ(parse_algorithm("rep_tree"), Algorithm::RepTree);
}

TEST(ModelFile, RoundTripPreservesScores) {
  const auto d = gaussian_blobs(40, 4, 1.5, 12);
  for (auto a : {Algorithm::OneR, Algorithm::NaiveBayes, Algorithm::Knn, Algorithm::RepTree, Algorithm::RandomForest}) {
    const auto model = fit(make_learner_spec(a, a == Algorithm::RandomForest ? Hyperparameters{{"n_trees", 10}}
                                                                             : Hyperparameters{}, 3),
                           d);
    const auto back = deserialize_model(serialize_model(model), "test");
    EXPECT_EQ(back, model) << algorithm_name(a);
    Rng rng(a == Algorithm::OneR ? 1 : 2);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(4);
      for (auto& v : x) v = 2 * standard_normal(rng);
      ASSERT_EQ(back.score(vec(d, x)), model.score(vec(d, x))) << algorithm_name(a);
    }
  }
}

TEST(ModelFile, SchemaMismatch) {
  const auto d = gaussian_blobs(20, 2, 2.0, 1);
  const auto model = fit_one_r(d);
  EXPECT_THROW(model.score({"other", {0.0, 0.0}}), Error);
  EXPECT_THROW(model.score({"test", {0.0}}), Error);
  EXPECT_THROW(deserialize_model(serialize_model(model), "all_features"), Error);
  EXPECT_THROW(deserialize_model("{\"format\": \"nope\"}"), Error);
}
