#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/eval.hpp"
#include "credulous/features.hpp"
#include "credulous/ingest.hpp"
#include "credulous/learners.hpp"
#include "credulous/random.hpp"
#include "credulous/text.hpp"

namespace cred {

/// account_id -> friend_id -> bot-task label (POSITIVE = bot).
using FriendBotLabels = std::map<std::string, std::map<std::string, ClassLabel>>;

/// Classifies every distinct friend snapshot once with the bot detector.
inline std::map<std::string, ClassLabel> classify_accounts(const TrainedModel& model,
                                                           std::span<const AccountSnapshot> accounts,
                                                           FeatureSetId set, Timestamp capture_time,
                                                           const ImputationPolicy& policy = {}) {
  if (model.schema.schema_id != feature_set_name(set))
    throw Error("schema_mismatch", "bot model uses schema " + model.schema.schema_id + ", extractor produces " +
                                       std::string(feature_set_name(set)));
  std::map<std::string, ClassLabel> out;
  for (const auto& a : accounts) out[a.account_id] = model.predict(extract(set, a, capture_time, policy));
  return out;
}

/// Labels the friends of each account with the bot detector. Friends without
/// a snapshot in `friends` stay unlabeled.
inline FriendBotLabels label_friends(const TrainedModel& model, std::span<const AccountSnapshot> accounts,
                                     std::span<const AccountSnapshot> friends, FeatureSetId set,
                                     Timestamp capture_time, const ImputationPolicy& policy = {}) {
  std::unordered_set<std::string_view> wanted;
  for (const auto& a : accounts) wanted.insert(a.friend_ids.begin(), a.friend_ids.end());
  std::vector<AccountSnapshot> needed;
  for (const auto& f : friends)
    if (wanted.contains(f.account_id)) needed.push_back(f);
  const auto verdicts = classify_accounts(model, needed, set, capture_time, policy);

  FriendBotLabels out;
  for (const auto& a : accounts) {
    auto& mine = out[a.account_id];
    for (const auto& fid : a.friend_ids)
      if (const auto it = verdicts.find(fid); it != verdicts.end()) mine[fid] = it->second;
  }
  return out;
}

struct BotRatio {
  double ratio = 0.0;
  std::size_t bots = 0;
  std::size_t labeled = 0;
};

inline BotRatio bot_ratio(const AccountSnapshot& account, const FriendBotLabels& labels) {
  BotRatio r;
  if (const auto it = labels.find(account.account_id); it != labels.end()) {
    for (const auto& fid : account.friend_ids) {
      const auto f = it->second.find(fid);
      if (f == it->second.end()) continue;
      ++r.labeled;
      r.bots += f->second == ClassLabel::Positive ? 1 : 0;
    }
  }
  if (r.labeled == 0) throw Error("undefined_ratio", "account " + account.account_id + " has no labeled friends");
  r.ratio = static_cast<double>(r.bots) / static_cast<double>(r.labeled);
  return r;
}

struct CredulityRule {
  double min_bot_ratio = 0.1;
  std::size_t min_bot_count = 0;
  std::uint64_t max_friends = kDefaultMaxFriends;
};

inline void validate_rule(const CredulityRule& rule) {
  if (!(std::isfinite(rule.min_bot_ratio) && rule.min_bot_ratio > 0.0 && rule.min_bot_ratio <= 1.0))
    throw ConfigError("invalid_rule", "min_bot_ratio must lie in (0, 1]");
  if (rule.max_friends < 1) throw ConfigError("invalid_rule", "max_friends must be >= 1");
}

struct GroundTruthEntry {
  std::string account_id;
  double bot_ratio = 0.0;
  std::size_t bot_count = 0;
  std::size_t friend_count = 0;  // labeled friends, the ratio's denominator
  ClassLabel label = ClassLabel::Negative;
};

/// Entries in rank order: descending ratio, then descending bot count, then
/// ascending account_id.
struct GroundTruth {
  std::vector<GroundTruthEntry> ranking;

  std::size_t credulous_count() const {
    return static_cast<std::size_t>(std::count_if(ranking.begin(), ranking.end(), [](const auto& e) {
      return e.label == ClassLabel::Positive;
    }));
  }
  std::map<std::string, ClassLabel> labels() const {
    std::map<std::string, ClassLabel> out;
    for (const auto& e : ranking) out[e.account_id] = e.label;
    return out;
  }
};

inline bool ranks_before(const GroundTruthEntry& a, const GroundTruthEntry& b) {
  if (a.bot_ratio != b.bot_ratio) return a.bot_ratio > b.bot_ratio;
  if (a.bot_count != b.bot_count) return a.bot_count > b.bot_count;
  return a.account_id < b.account_id;
}

/// Credulous iff ratio >= min_bot_ratio and bots >= min_bot_count (both inclusive).
inline GroundTruth derive_ground_truth(std::span<const AccountSnapshot> accounts, const FriendBotLabels& labels,
                                       const CredulityRule& rule) {
  validate_rule(rule);
  GroundTruth gt;
  for (const auto& a : accounts) {
    if (a.friends_count < 1 || a.friends_count > rule.max_friends)
      throw Error("ineligible_account", "account " + a.account_id + " has friends_count " +
                                            std::to_string(a.friends_count));
    const auto r = bot_ratio(a, labels);
    const bool credulous = r.ratio >= rule.min_bot_ratio && r.bots >= rule.min_bot_count;
    gt.ranking.push_back({a.account_id, r.ratio, r.bots, r.labeled,
                          credulous ? ClassLabel::Positive : ClassLabel::Negative});
  }
  std::sort(gt.ranking.begin(), gt.ranking.end(), ranks_before);
  return gt;
}

inline std::string render_ground_truth(const GroundTruth& gt) {
  std::string out = "account_id,bot_ratio,bot_count,friend_count,label\n";
  for (const auto& e : gt.ranking)
    out += e.account_id + "," + text::format_real(e.bot_ratio) + "," + std::to_string(e.bot_count) + "," +
           std::to_string(e.friend_count) + "," + label_name(e.label, LabelTask::Credulity) + "\n";
  return out;
}

inline GroundTruth parse_ground_truth(std::string_view body) {
  GroundTruth gt;
  std::size_t start = 0, line_no = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (++line_no == 1) {
      if (line != "account_id,bot_ratio,bot_count,friend_count,label")
        throw Error("bad_ground_truth", "unexpected header");
      continue;
    }
    const auto f = text::split_csv(line);
    const auto ratio = f.size() == 5 ? text::parse_real(f[1]) : std::nullopt;
    const auto bots = f.size() == 5 ? text::parse_int(f[2]) : std::nullopt;
    const auto friends = f.size() == 5 ? text::parse_int(f[3]) : std::nullopt;
    const auto label = f.size() == 5 ? parse_label(f[4]) : std::nullopt;
    if (!ratio || !bots || !friends || !label || *bots < 0 || *friends < 0)
      throw Error("bad_ground_truth", "line " + std::to_string(line_no));
    gt.ranking.push_back({f[0], *ratio, static_cast<std::size_t>(*bots), static_cast<std::size_t>(*friends), *label});
  }
  return gt;
}

// ---------------------------------------------------------------------------
// Balanced under-sampling
// ---------------------------------------------------------------------------

struct FoldPlan {
  std::vector<std::string> credulous;
  std::vector<std::vector<std::string>> partitions;  // not-credulous ids
  std::uint64_t seed = 0;

  bool operator==(const FoldPlan&) const = default;
};

/// Shuffles the not-credulous ids and cuts them into consecutive chunks of
/// |credulous|; a shorter final chunk keeps the remainder.
inline FoldPlan plan_undersampling_folds(const Dataset& d, std::uint64_t seed) {
  FoldPlan plan;
  plan.seed = seed;
  std::vector<std::string> others;
  for (const auto& inst : d.instances)
    (inst.label == ClassLabel::Positive ? plan.credulous : others).push_back(inst.account_id);
  if (plan.credulous.empty() || others.empty())
    throw Error("empty_class", "under-sampling needs both credulous and not-credulous instances");
  Rng rng(seed);
  shuffle(std::span<std::string>(others), rng);
  const std::size_t chunk = plan.credulous.size();
  for (std::size_t i = 0; i < others.size(); i += chunk)
    plan.partitions.emplace_back(others.begin() + static_cast<std::ptrdiff_t>(i),
                                 others.begin() + static_cast<std::ptrdiff_t>(std::min(others.size(), i + chunk)));
  return plan;
}

struct PartitionResult {
  std::size_t k_used = 0;
  std::uint64_t seed = 0;
  std::size_t size = 0;
  EvalReport report;
};

struct CredulousReport {
  std::string learner;
  std::string feature_set;
  std::vector<PartitionResult> partitions;
  FoldMetrics mean;    // over partition means, unweighted
  FoldMetrics stddev;  // population, over partitions
};

/// Balanced fold i = every credulous instance + partition i, cross-validated
/// with seed derive_seed(seed, i). k shrinks to the fold's minority size when
/// the fold is too small.
inline CredulousReport train_credulous(const LearnerSpec& spec, const Dataset& d, const FoldPlan& plan,
                                       std::size_t k = 10, std::uint64_t seed = 0, const CvOptions& opt = {}) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < d.size(); ++i) row_of.emplace(d.instances[i].account_id, i);
  auto rows_for = [&](const std::vector<std::string>& ids, ClassLabel expected) {
    std::vector<std::size_t> rows;
    for (const auto& id : ids) {
      const auto it = row_of.find(id);
      if (it == row_of.end() || d.instances[it->second].label != expected)
        throw Error("plan_mismatch", "fold plan id " + id + " does not match the dataset");
      rows.push_back(it->second);
    }
    return rows;
  };
  const auto credulous_rows = rows_for(plan.credulous, ClassLabel::Positive);

  CredulousReport out;
  out.learner = std::string(algorithm_name(spec.algorithm));
  out.feature_set = d.schema.schema_id;
  for (std::size_t p = 0; p < plan.partitions.size(); ++p) {
    auto rows = credulous_rows;
    const auto part = rows_for(plan.partitions[p], ClassLabel::Negative);
    rows.insert(rows.end(), part.begin(), part.end());
    const Dataset fold = subset(d, rows);
    PartitionResult r;
    r.size = fold.size();
    r.seed = derive_seed(seed, p);
    r.k_used = std::min({k, credulous_rows.size(), part.size()});
    if (r.k_used < 2)
      throw Error("insufficient_class_for_k", "partition " + std::to_string(p) + " is too small for cross-validation");
    r.report = cross_validate(spec, fold, r.k_used, r.seed, opt);
    out.partitions.push_back(std::move(r));
  }
  std::vector<FoldMetrics> means;
  for (const auto& r : out.partitions) means.push_back(r.report.mean);
  std::tie(out.mean, out.stddev) = summarize(means);
  return out;
}

inline text::KeyValues credulous_report_key_values(const CredulousReport& r) {
  text::KeyValues kv{{"learner", r.learner},
                     {"feature_set", r.feature_set},
                     {"partitions", std::to_string(r.partitions.size())}};
  const auto m = r.mean.as_array(), s = r.stddev.as_array();
  for (std::size_t i = 0; i < 5; ++i) kv.emplace_back(std::string("mean.") + kMetricNames[i], text::format_real(m[i]));
  for (std::size_t i = 0; i < 5; ++i)
    kv.emplace_back(std::string("stddev.") + kMetricNames[i], text::format_real(s[i]));
  for (std::size_t p = 0; p < r.partitions.size(); ++p) {
    const std::string prefix = "partition." + std::to_string(p) + ".";
    kv.emplace_back(prefix + "size", std::to_string(r.partitions[p].size));
    kv.emplace_back(prefix + "k_used", std::to_string(r.partitions[p].k_used));
    kv.emplace_back(prefix + "seed", std::to_string(r.partitions[p].seed));
    for (auto& e : report_key_values(r.partitions[p].report, prefix)) kv.push_back(std::move(e));
  }
  return kv;
}

inline CredulousReport credulous_report_from_key_values(const text::KeyValues& kv) {
  std::map<std::string, std::string> m(kv.begin(), kv.end());
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = m.find(key);
    if (it == m.end()) throw Error("bad_report", "missing key " + key);
    return it->second;
  };
  auto num = [&](const std::string& key) {
    const auto v = text::parse_real(get(key));
    if (!v) throw Error("bad_report", "not a number: " + key);
    return *v;
  };
  CredulousReport r;
  r.learner = get("learner");
  r.feature_set = get("feature_set");
  std::array<double, 5> mean{}, sd{};
  for (std::size_t i = 0; i < 5; ++i) {
    mean[i] = num(std::string("mean.") + kMetricNames[i]);
    sd[i] = num(std::string("stddev.") + kMetricNames[i]);
  }
  r.mean = FoldMetrics::from_array(mean);
  r.stddev = FoldMetrics::from_array(sd);
  const auto n = static_cast<std::size_t>(num("partitions"));
  for (std::size_t p = 0; p < n; ++p) {
    const std::string prefix = "partition." + std::to_string(p) + ".";
    PartitionResult pr;
    pr.size = static_cast<std::size_t>(num(prefix + "size"));
    pr.k_used = static_cast<std::size_t>(num(prefix + "k_used"));
    pr.seed = std::stoull(get(prefix + "seed"));
    pr.report = report_from_key_values(kv, prefix);
    r.partitions.push_back(std::move(pr));
  }
  return r;
}

}  // namespace cred
