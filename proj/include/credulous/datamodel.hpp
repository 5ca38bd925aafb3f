#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "credulous/error.hpp"
#include "credulous/text.hpp"

namespace cred {

// Collection caps of the crawler that produced the snapshots.
inline constexpr std::size_t kMaxTweets = 3200;
inline constexpr std::uint32_t kMaxMentions = 100;
inline constexpr std::size_t kMaxFriendIds = 5000;

using Timestamp = std::chrono::sys_seconds;

/// Parses an RFC 3339 timestamp ("2019-05-01T12:30:00Z", optional fractional
/// seconds, "Z" or a numeric offset). Fractions are truncated.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':')
    return std::nullopt;
  const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  const auto h = digits(11, 2), mi = digits(14, 2), se = digits(17, 2);
  if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 60) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const auto frac_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == frac_start) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;
  seconds offset{0};
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const auto oh = digits(pos + 1, 2), om = digits(pos + 4, 2);
    if (!oh || !om || pos + 3 >= s.size() || s[pos + 3] != ':') return std::nullopt;
    offset = hours{*oh} + minutes{*om};
    if (s[pos] == '-') offset = -offset;
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*se} - offset;
}

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(hms.hours().count()), static_cast<long long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

/// Binary class. The reading is task-specific: bot task POSITIVE = bot,
/// credulity task POSITIVE = credulous.
enum class ClassLabel : std::uint8_t { Negative = 0, Positive = 1 };

struct TweetDigest {
  Timestamp posted_at{};
  bool is_retweet = false;
  bool is_reply = false;
  std::uint32_t hashtag_count = 0;
  std::uint32_t url_count = 0;
  std::uint32_t mention_count = 0;

  bool operator==(const TweetDigest&) const = default;
};

// Scores from an external bot-scoring service; all optional passthrough.
struct ExternalScores {
  std::optional<double> cap;
  std::optional<double> score_english;
  std::optional<double> score_universal;

  bool operator==(const ExternalScores&) const = default;
};

struct AccountSnapshot {
  std::string account_id;
  std::string screen_name;
  Timestamp created_at{};
  std::uint64_t statuses_count = 0;
  std::uint64_t followers_count = 0;
  std::uint64_t friends_count = 0;
  std::uint64_t favourites_count = 0;
  std::uint64_t listed_count = 0;
  bool verified = false;
  bool geo_enabled = false;
  bool default_profile = false;
  bool default_profile_image = false;
  std::string description;
  bool profile_url_present = false;
  std::vector<TweetDigest> tweets;
  std::uint32_t mentions_collected = 0;
  std::vector<std::string> friend_ids;
  std::optional<ExternalScores> external_scores;

  bool operator==(const AccountSnapshot&) const = default;
};

/// Names every violated snapshot invariant; empty means valid.
/// `capture_time`, when given, bounds created_at from above.
inline std::vector<std::string> validate_snapshot(const AccountSnapshot& s,
                                                  std::optional<Timestamp> capture_time = std::nullopt) {
  std::vector<std::string> violations;
  if (s.account_id.empty()) violations.emplace_back("empty_account_id");
  if (s.tweets.size() > kMaxTweets) violations.emplace_back("tweets_cap_exceeded");
  if (s.mentions_collected > kMaxMentions) violations.emplace_back("mentions_cap_exceeded");
  if (s.friend_ids.size() > kMaxFriendIds) violations.emplace_back("friends_cap_exceeded");

  std::unordered_set<std::string_view> seen;
  seen.reserve(s.friend_ids.size());
  bool duplicate = false, self = false;
  for (const auto& f : s.friend_ids) {
    if (!seen.insert(f).second) duplicate = true;
    if (f == s.account_id) self = true;
  }
  if (duplicate) violations.emplace_back("duplicate_friend");
  if (self) violations.emplace_back("self_friend");

  if (capture_time && s.created_at > *capture_time) violations.emplace_back("created_in_future");
  if (std::any_of(s.tweets.begin(), s.tweets.end(),
                  [&](const TweetDigest& t) { return t.posted_at < s.created_at; }))
    violations.emplace_back("tweet_before_creation");

  if (s.external_scores) {
    const auto& e = *s.external_scores;
    if (e.cap && (!std::isfinite(*e.cap) || *e.cap < 0.0 || *e.cap > 1.0))
      violations.emplace_back("cap_out_of_range");
    if ((e.score_english && !std::isfinite(*e.score_english)) ||
        (e.score_universal && !std::isfinite(*e.score_universal)))
      violations.emplace_back("score_not_finite");
  }
  return violations;
}

struct FeatureSchema {
  std::string schema_id;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return feature_names.size(); }
  bool operator==(const FeatureSchema&) const = default;
};

struct FeatureVector {
  std::string schema_id;
  std::vector<double> values;

  bool operator==(const FeatureVector&) const = default;
};

struct LabeledInstance {
  std::string account_id;
  FeatureVector features;
  ClassLabel label = ClassLabel::Negative;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<LabeledInstance> instances;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }
};

/// Throws unless every instance matches the schema, is finite and has a
/// unique account id.
inline void check_dataset(const Dataset& d) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(d.instances.size());
  for (const auto& inst : d.instances) {
    if (inst.features.schema_id != d.schema.schema_id)
      throw Error("schema_mismatch", "instance " + inst.account_id + " has schema " + inst.features.schema_id +
                                         ", dataset expects " + d.schema.schema_id);
    if (inst.features.values.size() != d.schema.size())
      throw Error("schema_mismatch", "instance " + inst.account_id + " has wrong vector length");
    for (double v : inst.features.values)
      if (!std::isfinite(v)) throw Error("non_finite_feature", "instance " + inst.account_id);
    if (!ids.insert(inst.account_id).second) throw Error("duplicate_account_id", inst.account_id);
  }
}

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;

  bool operator==(const ClassCounts&) const = default;
};

inline ClassCounts dataset_class_counts(const Dataset& d) {
  ClassCounts c;
  for (const auto& inst : d.instances) (inst.label == ClassLabel::Positive ? c.positives : c.negatives)++;
  return c;
}

/// Same schema, instances picked by index in the given order.
inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices) {
  Dataset out{d.schema, {}};
  out.instances.reserve(indices.size());
  for (auto i : indices) out.instances.push_back(d.instances[i]);
  return out;
}

}  // namespace cred
