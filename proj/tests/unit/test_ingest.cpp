#include <gtest/gtest.h>

#include "credulous/ingest.hpp"
#include "credulous/synth.hpp"
#include "support.hpp"

using namespace cred;
using testing_support::kCapture;
using testing_support::make_snapshot;
using testing_support::TempDir;

namespace {

std::string write_lines(const TempDir& dir, const std::vector<std::string>& lines) {
  std::string body;
  for (const auto& l : lines) body += l + "\n";
  const auto path = dir.str("snapshots.jsonl");
  text::write_file(path, body);
  return path;
}

LabeledSnapshot human(const std::string& id, std::uint64_t friends) {
  auto s = make_snapshot(id);
  s.friends_count = friends;
  return {s, ClassLabel::Negative};
}

}  // namespace

TEST(LoadSnapshots, ThreeValidRecords) {
  TempDir dir("ingest");
  const auto path = write_lines(dir, {snapshot_to_line(make_snapshot("1")), snapshot_to_line(make_snapshot("2")),
                                      snapshot_to_line(make_snapshot("3"))});
  const auto r = load_snapshots({path, std::nullopt, kCapture});
  EXPECT_EQ(r.snapshots.size(), 3u);
  EXPECT_TRUE(r.rejections.empty());
}

TEST(LoadSnapshots, RejectsRecordOverTweetCap) {
  TempDir dir("ingest");
  auto big = make_snapshot("2");
  big.tweets.assign(kMaxTweets + 1, TweetDigest{big.created_at});
  const auto path = write_lines(dir, {snapshot_to_line(make_snapshot("1")), snapshot_to_line(big),
                                      snapshot_to_line(make_snapshot("3"))});
  const auto r = load_snapshots({path, std::nullopt, kCapture});
  EXPECT_EQ(r.snapshots.size(), 2u);
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].line, 2u);
  EXPECT_EQ(r.rejections[0].reason, "tweets_cap_exceeded");
}

TEST(LoadSnapshots, EmptyFile) {
  TempDir dir("ingest");
  const auto path = write_lines(dir, {});
  const auto r = load_snapshots({path, std::nullopt, kCapture});
  EXPECT_TRUE(r.snapshots.empty());
  EXPECT_TRUE(r.rejections.empty());
}

TEST(LoadSnapshots, MalformedAndDuplicateLines) {
  TempDir dir("ingest");
  const auto path = write_lines(dir, {snapshot_to_line(make_snapshot("1")), "{not json", R"({"account_id": "x"})",
                                      snapshot_to_line(make_snapshot("1"))});
  const auto r = load_snapshots({path, std::nullopt, kCapture});
  EXPECT_EQ(r.snapshots.size(), 1u);
  ASSERT_EQ(r.rejections.size(), 3u);
  EXPECT_EQ(r.rejections[0].reason, "malformed_record");
  EXPECT_EQ(r.rejections[1].reason, "malformed_record");
  EXPECT_EQ(r.rejections[2].reason, "duplicate_account_id");
}

TEST(LoadSnapshots, MissingFileThrows) {
  EXPECT_THROW(load_snapshots({"/nonexistent/credulous/x.jsonl", std::nullopt, kCapture}), Error);
}

TEST(SnapshotJson, RoundTripsGeneratedSnapshots) {
  SynthConfig cfg;
  cfg.n_humans = 60;
  cfg.n_bots = 60;
  cfg.friends_per_human = {5, 30};
  cfg.seed = 3;
  const auto corpus = generate_corpus(cfg);
  for (const auto& s : corpus.snapshots) EXPECT_EQ(snapshot_from_line(snapshot_to_line(s)), s);
}

TEST(SnapshotJson, PartialExternalScoresSurvive) {
  auto s = make_snapshot("1");
  s.external_scores = ExternalScores{0.25, std::nullopt, -1.5};
  EXPECT_EQ(snapshot_from_line(snapshot_to_line(s)), s);
}

TEST(Labels, ParseAndRoundTrip) {
  const auto labels = parse_labels("account_id,label\n1,bot\n2,human\n\n3,credulous\n");
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels[0].label, ClassLabel::Positive);
  EXPECT_EQ(labels[1].label, ClassLabel::Negative);
  EXPECT_EQ(labels[2].label, ClassLabel::Positive);
  EXPECT_THROW(parse_labels("id,label\n1,bot\n"), Error);
  EXPECT_THROW(parse_labels("account_id,label\n1,robot\n"), Error);

  TempDir dir("labels");
  write_labels(dir.str("l.csv"), labels, LabelTask::Bot);
  const auto back = read_labels(dir.str("l.csv"));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].account_id, labels[i].account_id);
    EXPECT_EQ(back[i].label, labels[i].label);
  }
}

TEST(JoinLabels, PartialLabels) {
  std::vector<AccountSnapshot> snaps;
  for (const char* id : {"1", "2", "3", "4", "5"}) snaps.push_back(make_snapshot(id));
  const std::vector<LabelRecord> labels{{"2", ClassLabel::Positive}, {"4", ClassLabel::Negative}, {"5", ClassLabel::Positive}};
  const auto j = join_labels(snaps, labels);
  ASSERT_EQ(j.pairs.size(), 3u);
  EXPECT_EQ(j.pairs[0].snapshot.account_id, "2");
  EXPECT_EQ(j.pairs[1].label, ClassLabel::Negative);
  EXPECT_EQ(j.unlabeled, (std::vector<std::string>{"1", "3"}));
  EXPECT_TRUE(j.missing_snapshots.empty());
}

TEST(JoinLabels, DisjointIds) {
  const std::vector<AccountSnapshot> snaps{make_snapshot("1")};
  const std::vector<LabelRecord> labels{{"9", ClassLabel::Positive}};
  const auto j = join_labels(snaps, labels);
  EXPECT_TRUE(j.pairs.empty());
  EXPECT_EQ(j.missing_snapshots, std::vector<std::string>{"9"});
}

TEST(JoinLabels, DuplicateLabelIsFatal) {
  const std::vector<AccountSnapshot> snaps{make_snapshot("1")};
  const std::vector<LabelRecord> labels{{"1", ClassLabel::Positive}, {"1", ClassLabel::Negative}};
  EXPECT_THROW(join_labels(snaps, labels), Error);
}

TEST(FilterEligibleHumans, FriendBoundaryIsInclusive) {
  const std::vector<LabeledSnapshot> pairs{human("a", 400), human("b", 401), human("c", 0), human("d", 1)};
  const auto kept = filter_eligible_humans(pairs);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].account_id, "a");
  EXPECT_EQ(kept[1].account_id, "d");
}

TEST(FilterEligibleHumans, BotsExcluded) {
  auto bot = human("b", 10);
  bot.label = ClassLabel::Positive;
  const std::vector<LabeledSnapshot> pairs{bot};
  EXPECT_TRUE(filter_eligible_humans(pairs).empty());
  EXPECT_THROW(filter_eligible_humans(pairs, 0), ConfigError);
}
