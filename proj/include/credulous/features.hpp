#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/ingest.hpp"
#include "credulous/text.hpp"

namespace cred {

enum class FeatureSetId { ClassAMinus, BotometerPlus, AllFeatures };

inline constexpr std::array<std::string_view, 16> kClassAFeatures = {
    "account_age_days",        "statuses_count",        "followers_count",
    "friends_count",           "favourites_count",      "listed_count",
    "default_profile",         "default_profile_image", "has_description",
    "description_length",      "profile_url_present",   "verified",
    "geo_enabled",             "screen_name_length",    "screen_name_digit_count",
    "followers_to_friends_ratio"};

inline constexpr std::array<std::string_view, 12> kBotometerPlusFeatures = {
    "tweet_count_collected",  "mention_count_collected", "retweet_fraction",    "reply_fraction",
    "mean_hashtags_per_tweet", "mean_urls_per_tweet",    "mean_mentions_per_tweet", "tweets_per_day",
    "hour_of_day_entropy",    "cap",                     "score_english",       "score_universal"};

inline std::string_view feature_set_name(FeatureSetId id) {
  switch (id) {
    case FeatureSetId::ClassAMinus: return "class_a_minus";
    case FeatureSetId::BotometerPlus: return "botometer_plus";
    case FeatureSetId::AllFeatures: return "all_features";
  }
  return "";
}

inline std::optional<FeatureSetId> parse_feature_set(std::string_view name) {
  for (auto id : {FeatureSetId::ClassAMinus, FeatureSetId::BotometerPlus, FeatureSetId::AllFeatures})
    if (feature_set_name(id) == name) return id;
  return std::nullopt;
}

inline FeatureSchema feature_schema(FeatureSetId id) {
  FeatureSchema schema{std::string(feature_set_name(id)), {}};
  if (id != FeatureSetId::BotometerPlus)
    for (auto n : kClassAFeatures) schema.feature_names.emplace_back(n);
  if (id != FeatureSetId::ClassAMinus)
    for (auto n : kBotometerPlusFeatures) schema.feature_names.emplace_back(n);
  return schema;
}

// ---------------------------------------------------------------------------
// Imputation of the optional external scores
// ---------------------------------------------------------------------------

enum class ImputationStrategy { ConstantZero, TrainingMean };

struct ImputationPolicy {
  std::map<std::string, ImputationStrategy> strategy{{"cap", ImputationStrategy::ConstantZero},
                                                     {"score_english", ImputationStrategy::ConstantZero},
                                                     {"score_universal", ImputationStrategy::ConstantZero}};
  // Fill value per feature; only read for TrainingMean.
  std::map<std::string, double> constants{{"cap", 0.0}, {"score_english", 0.0}, {"score_universal", 0.0}};

  double fill_value(const std::string& feature) const {
    const auto it = strategy.find(feature);
    if (it == strategy.end()) throw Error("unknown_imputed_feature", feature);
    if (it->second == ImputationStrategy::ConstantZero) return 0.0;
    const auto c = constants.find(feature);
    return c == constants.end() ? 0.0 : c->second;
  }

  bool operator==(const ImputationPolicy&) const = default;
};

/// TrainingMean policy whose fill values are the means of the present scores
/// (0 when a score is absent everywhere).
inline ImputationPolicy fit_training_mean_policy(std::span<const AccountSnapshot> training) {
  ImputationPolicy p;
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> n{};
  for (const auto& s : training) {
    if (!s.external_scores) continue;
    const auto& e = *s.external_scores;
    const std::array<std::optional<double>, 3> v{e.cap, e.score_english, e.score_universal};
    for (std::size_t i = 0; i < 3; ++i)
      if (v[i]) sum[i] += *v[i], ++n[i];
  }
  const std::array<const char*, 3> names{"cap", "score_english", "score_universal"};
  for (std::size_t i = 0; i < 3; ++i) {
    p.strategy[names[i]] = ImputationStrategy::TrainingMean;
    p.constants[names[i]] = n[i] ? sum[i] / static_cast<double>(n[i]) : 0.0;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

inline double account_age_days(const AccountSnapshot& s, Timestamp capture_time) {
  const auto secs = (capture_time - s.created_at).count();
  return std::max(0.0, static_cast<double>(secs) / 86400.0);
}

/// Shannon entropy (natural log) of the 24-bin UTC posting-hour histogram.
inline double hour_of_day_entropy(std::span<const TweetDigest> tweets) {
  if (tweets.empty()) return 0.0;
  std::array<std::size_t, 24> bins{};
  for (const auto& t : tweets) {
    const auto since_midnight = t.posted_at - std::chrono::floor<std::chrono::days>(t.posted_at);
    bins[static_cast<std::size_t>(std::chrono::floor<std::chrono::hours>(since_midnight).count())]++;
  }
  const double n = static_cast<double>(tweets.size());
  double h = 0.0;
  for (auto c : bins)
    if (c) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  return std::max(0.0, h);
}

namespace detail {

inline void append_class_a(const AccountSnapshot& s, Timestamp capture_time, std::vector<double>& out) {
  const auto digits = std::count_if(s.screen_name.begin(), s.screen_name.end(),
                                    [](char c) { return c >= '0' && c <= '9'; });
  const double followers = static_cast<double>(s.followers_count);
  // friends = 0 only happens for bot-task accounts; the ratio degrades to followers.
  const double ratio = s.friends_count == 0 ? followers : followers / static_cast<double>(s.friends_count);
  out.insert(out.end(), {account_age_days(s, capture_time),
                         static_cast<double>(s.statuses_count),
                         followers,
                         static_cast<double>(s.friends_count),
                         static_cast<double>(s.favourites_count),
                         static_cast<double>(s.listed_count),
                         s.default_profile ? 1.0 : 0.0,
                         s.default_profile_image ? 1.0 : 0.0,
                         s.description.empty() ? 0.0 : 1.0,
                         static_cast<double>(s.description.size()),
                         s.profile_url_present ? 1.0 : 0.0,
                         s.verified ? 1.0 : 0.0,
                         s.geo_enabled ? 1.0 : 0.0,
                         static_cast<double>(s.screen_name.size()),
                         static_cast<double>(digits),
                         ratio});
}

inline void append_botometer_plus(const AccountSnapshot& s, Timestamp capture_time, const ImputationPolicy& policy,
                                  std::vector<double>& out) {
  const double n = static_cast<double>(s.tweets.size());
  double retweets = 0, replies = 0, hashtags = 0, urls = 0, mentions = 0;
  for (const auto& t : s.tweets) {
    retweets += t.is_retweet ? 1 : 0;
    replies += t.is_reply ? 1 : 0;
    hashtags += t.hashtag_count;
    urls += t.url_count;
    mentions += t.mention_count;
  }
  auto per_tweet = [n](double total) { return n > 0 ? total / n : 0.0; };
  auto score = [&](const std::optional<double>& v, const char* name) {
    return v ? *v : policy.fill_value(name);
  };
  const ExternalScores none{};
  const ExternalScores& e = s.external_scores ? *s.external_scores : none;
  out.insert(out.end(), {n,
                         static_cast<double>(s.mentions_collected),
                         per_tweet(retweets),
                         per_tweet(replies),
                         per_tweet(hashtags),
                         per_tweet(urls),
                         per_tweet(mentions),
                         n / std::max(account_age_days(s, capture_time), 1.0),
                         hour_of_day_entropy(s.tweets),
                         score(e.cap, "cap"),
                         score(e.score_english, "score_english"),
                         score(e.score_universal, "score_universal")});
}

}  // namespace detail

inline FeatureVector extract_class_a(const AccountSnapshot& s, Timestamp capture_time) {
  FeatureVector v{std::string(feature_set_name(FeatureSetId::ClassAMinus)), {}};
  v.values.reserve(kClassAFeatures.size());
  detail::append_class_a(s, capture_time, v.values);
  return v;
}

inline FeatureVector extract_botometer_plus(const AccountSnapshot& s, Timestamp capture_time,
                                            const ImputationPolicy& policy = {}) {
  FeatureVector v{std::string(feature_set_name(FeatureSetId::BotometerPlus)), {}};
  v.values.reserve(kBotometerPlusFeatures.size());
  detail::append_botometer_plus(s, capture_time, policy, v.values);
  return v;
}

inline FeatureVector extract_all(const AccountSnapshot& s, Timestamp capture_time, const ImputationPolicy& policy = {}) {
  FeatureVector v{std::string(feature_set_name(FeatureSetId::AllFeatures)), {}};
  v.values.reserve(kClassAFeatures.size() + kBotometerPlusFeatures.size());
  detail::append_class_a(s, capture_time, v.values);
  detail::append_botometer_plus(s, capture_time, policy, v.values);
  return v;
}

inline FeatureVector extract(FeatureSetId set, const AccountSnapshot& s, Timestamp capture_time,
                             const ImputationPolicy& policy = {}) {
  switch (set) {
    case FeatureSetId::ClassAMinus: return extract_class_a(s, capture_time);
    case FeatureSetId::BotometerPlus: return extract_botometer_plus(s, capture_time, policy);
    case FeatureSetId::AllFeatures: return extract_all(s, capture_time, policy);
  }
  throw Error("unknown_feature_set", "bad FeatureSetId");
}

struct LabeledAccount {
  const AccountSnapshot* snapshot = nullptr;
  ClassLabel label = ClassLabel::Negative;
};

inline Dataset build_dataset(FeatureSetId set, std::span<const LabeledAccount> accounts, Timestamp capture_time,
                             const ImputationPolicy& policy = {}) {
  Dataset d{feature_schema(set), {}};
  d.instances.reserve(accounts.size());
  for (const auto& a : accounts)
    d.instances.push_back({a.snapshot->account_id, extract(set, *a.snapshot, capture_time, policy), a.label});
  check_dataset(d);
  return d;
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct StandardizationTable {
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  double apply(std::size_t feature, double x) const {
    return stddev[feature] > 0.0 ? (x - mean[feature]) / stddev[feature] : 0.0;
  }

  std::vector<double> apply(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = apply(j, row[j]);
    return out;
  }

  bool operator==(const StandardizationTable&) const = default;
};

inline StandardizationTable fit_standardization(const Dataset& train) {
  if (train.empty()) throw Error("empty_dataset", "cannot standardize on an empty training set");
  const std::size_t dims = train.schema.size();
  const double n = static_cast<double>(train.size());
  StandardizationTable t{std::vector<double>(dims, 0.0), std::vector<double>(dims, 0.0)};
  for (const auto& inst : train.instances)
    for (std::size_t j = 0; j < dims; ++j) t.mean[j] += inst.features.values[j];
  for (auto& m : t.mean) m /= n;
  for (const auto& inst : train.instances)
    for (std::size_t j = 0; j < dims; ++j) {
      const double d = inst.features.values[j] - t.mean[j];
      t.stddev[j] += d * d;
    }
  for (std::size_t j = 0; j < dims; ++j) {
    const auto [lo, hi] = std::minmax_element(train.instances.begin(), train.instances.end(),
                                              [j](const LabeledInstance& a, const LabeledInstance& b) {
                                                return a.features.values[j] < b.features.values[j];
                                              });
    const bool constant = lo->features.values[j] == hi->features.values[j];
    t.stddev[j] = constant ? 0.0 : std::sqrt(t.stddev[j] / n);
  }
  return t;
}

inline Dataset apply_standardization(const StandardizationTable& t, Dataset d) {
  for (auto& inst : d.instances) inst.features.values = t.apply(inst.features.values);
  return d;
}

struct StandardizeResult {
  Dataset train;
  std::vector<Dataset> others;
  StandardizationTable table;
};

/// Rescales every dataset with statistics of `train` only.
inline StandardizeResult standardize(const Dataset& train, std::span<const Dataset> others) {
  StandardizeResult r{{}, {}, fit_standardization(train)};
  r.train = apply_standardization(r.table, train);
  for (const auto& o : others) {
    if (o.schema.schema_id != train.schema.schema_id) throw Error("schema_mismatch", "standardize across schemas");
    r.others.push_back(apply_standardization(r.table, o));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Feature matrix CSV
// ---------------------------------------------------------------------------

inline std::string render_feature_matrix(const Dataset& d, bool with_labels, LabelTask task = LabelTask::Bot) {
  std::string out = "account_id";
  for (const auto& n : d.schema.feature_names) out += "," + n;
  if (with_labels) out += ",label";
  out += "\n";
  for (const auto& inst : d.instances) {
    out += inst.account_id;
    for (double v : inst.features.values) out += "," + text::format_real(v);
    if (with_labels) out += "," + label_name(inst.label, task);
    out += "\n";
  }
  return out;
}

/// Parses a feature matrix; rows without a label column default to NEGATIVE.
inline Dataset parse_feature_matrix(std::string_view body, const std::string& schema_id) {
  Dataset d;
  d.schema.schema_id = schema_id;
  bool has_label = false;
  std::size_t start = 0, line_no = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = text::split_csv(line);
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "account_id") throw Error("bad_matrix_header", "first column must be account_id");
      has_label = fields.back() == "label";
      d.schema.feature_names.assign(fields.begin() + 1, fields.end() - (has_label ? 1 : 0));
      continue;
    }
    const std::size_t expected = d.schema.size() + 1 + (has_label ? 1 : 0);
    if (fields.size() != expected) throw Error("bad_matrix_row", "line " + std::to_string(line_no));
    LabeledInstance inst{fields[0], {schema_id, {}}, ClassLabel::Negative};
    for (std::size_t j = 1; j <= d.schema.size(); ++j) {
      const auto v = text::parse_real(fields[j]);
      if (!v) throw Error("bad_matrix_row", "line " + std::to_string(line_no) + ": " + fields[j]);
      inst.features.values.push_back(*v);
    }
    if (has_label) {
      const auto l = parse_label(fields.back());
      if (!l) throw Error("bad_matrix_row", "line " + std::to_string(line_no) + ": label " + fields.back());
      inst.label = *l;
    }
    d.instances.push_back(std::move(inst));
  }
  check_dataset(d);
  return d;
}

}  // namespace cred
