#include <gtest/gtest.h>

#include <set>

#include "credulous/credulity.hpp"
#include "credulous/eval.hpp"
#include "credulous/synth.hpp"
#include "support.hpp"

using namespace cred;
using testing_support::TempDir;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.n_humans = 200;
  c.n_bots = 200;
  c.friends_per_human = {10, 100};
  c.seed = 5;
  return c;
}

/// Friend labels taken from the generator's own bot/human labels.
FriendBotLabels true_friend_labels(const SynthCorpus& corpus) {
  std::map<std::string, ClassLabel> is_bot;
  for (const auto& l : corpus.labels) is_bot[l.account_id] = l.label;
  FriendBotLabels out;
  for (const auto& s : corpus.snapshots)
    for (const auto& f : s.friend_ids) out[s.account_id][f] = is_bot.at(f);
  return out;
}

Dataset bot_dataset(const SynthCorpus& corpus) {
  std::vector<LabeledAccount> accounts;
  for (std::size_t i = 0; i < corpus.snapshots.size(); ++i)
    accounts.push_back({&corpus.snapshots[i], corpus.labels[i].label});
  return build_dataset(FeatureSetId::AllFeatures, accounts, corpus.capture_time);
}

}  // namespace

TEST(Synth, SnapshotsAreValidAndWithinCaps) {
  auto c = small_config();
  c.tweets_per_account = {0, 3200};
  const auto corpus = generate_corpus(c);
  ASSERT_EQ(corpus.snapshots.size(), 400u);
  for (const auto& s : corpus.snapshots) {
    EXPECT_TRUE(validate_snapshot(s, corpus.capture_time).empty()) << s.account_id;
    EXPECT_LE(s.tweets.size(), kMaxTweets);
  }
}

TEST(Synth, FriendListsMatchCounts) {
  const auto corpus = generate_corpus(small_config());
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& s = corpus.snapshots[i];
    EXPECT_EQ(s.friend_ids.size(), s.friends_count);
    EXPECT_GE(s.friends_count, 10u);
    EXPECT_LE(s.friends_count, 100u);
  }
}

TEST(Synth, PlantedCountUsesFloor) {
  auto c = small_config();
  c.n_humans = 1000;
  c.friends_per_human = {10, 150};
  c.credulous_fraction = 0.1;
  EXPECT_EQ(generate_corpus(c).planted_credulous.size(), 100u);
  c.credulous_fraction = 0.0999;
  EXPECT_EQ(generate_corpus(c).planted_credulous.size(), 99u);
}

TEST(Synth, FullDensityGivesRatioOne) {
  auto c = small_config();
  c.bot_density_credulous = 1.0;
  const auto corpus = generate_corpus(c);
  const auto labels = true_friend_labels(corpus);
  const std::set<std::string> planted(corpus.planted_credulous.begin(), corpus.planted_credulous.end());
  ASSERT_EQ(planted.size(), 20u);
  for (const auto& s : corpus.snapshots)
    if (planted.contains(s.account_id)) EXPECT_EQ(bot_ratio(s, labels).ratio, 1.0);
}

TEST(Synth, PlantedUsersHaveMoreBotFriends) {
  auto c = small_config();
  c.n_humans = 600;
  const auto corpus = generate_corpus(c);
  const auto labels = true_friend_labels(corpus);
  const std::set<std::string> planted(corpus.planted_credulous.begin(), corpus.planted_credulous.end());
  double sum[2] = {0, 0}, n[2] = {0, 0};
  for (std::size_t i = 0; i < c.n_humans; ++i) {
    const auto& s = corpus.snapshots[i];
    const int g = planted.contains(s.account_id);
    sum[g] += bot_ratio(s, labels).ratio;
    n[g]++;
  }
  EXPECT_GT(sum[1] / n[1], sum[0] / n[0]);
}

TEST(Synth, SameSeedSameFiles) {
  TempDir a("synth"), b("synth");
  const auto fa = write_corpus(generate_corpus(small_config()), a.path());
  const auto fb = write_corpus(generate_corpus(small_config()), b.path());
  for (auto [x, y] : {std::pair{fa.snapshots, fb.snapshots}, {fa.labels, fb.labels}, {fa.planted, fb.planted},
                      {fa.manifest, fb.manifest}})
    EXPECT_EQ(text::read_file(x), text::read_file(y));
  auto other = small_config();
  other.seed = 6;
  TempDir c("synth");
  const auto fc = write_corpus(generate_corpus(other), c.path());
  EXPECT_NE(text::read_file(fa.snapshots), text::read_file(fc.snapshots));
}

TEST(Synth, CorpusLoadsThroughIngest) {
  TempDir dir("synth");
  const auto corpus = generate_corpus(small_config());
  const auto files = write_corpus(corpus, dir.path());
  const auto manifest = read_manifest(files.manifest);
  const auto loaded = load_snapshots(manifest);
  EXPECT_TRUE(loaded.rejections.empty());
  EXPECT_EQ(loaded.snapshots, corpus.snapshots);
  const auto joined = join_labels(loaded.snapshots, read_labels(*manifest.labels_path));
  EXPECT_EQ(joined.pairs.size(), 400u);
}

TEST(Synth, ZeroSeparationIsUnlearnable) {
  auto c = small_config();
  c.n_humans = 1000;
  c.n_bots = 1000;
  c.separation = 0.0;
  const auto d = bot_dataset(generate_corpus(c));
  const auto r = cross_validate(make_learner_spec(Algorithm::NaiveBayes), d, 10, 1);
  EXPECT_NEAR(r.mean.accuracy_percent, 50.0, 5.0);
}

TEST(Synth, InvalidConfigs) {
  auto c = small_config();
  c.bot_density_credulous = 0.01;
  try {
    generate_corpus(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), "invalid_bot_density_credulous");
  }
  c = small_config();
  c.friends_per_human = {10, 300};
  try {
    generate_corpus(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "infeasible_friend_counts");
  }
  c = small_config();
  c.separation = -1;
  EXPECT_THROW(generate_corpus(c), ConfigError);
}
