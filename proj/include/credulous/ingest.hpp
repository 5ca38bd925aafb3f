#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/text.hpp"

namespace cred {

// ---------------------------------------------------------------------------
// Snapshot line format: one JSON object per line, keys named after the
// AccountSnapshot fields, timestamps as RFC 3339 strings.
// ---------------------------------------------------------------------------

namespace detail {

inline Timestamp timestamp_from_json(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw Error("bad_timestamp", std::string(key) + " is not a string");
  auto t = parse_timestamp(v.get<std::string>());
  if (!t) throw Error("bad_timestamp", std::string(key) + " = " + v.get<std::string>());
  return *t;
}

inline std::optional<double> optional_real(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const TweetDigest& t) {
  j = nlohmann::json{{"posted_at", format_timestamp(t.posted_at)},
                     {"is_retweet", t.is_retweet},
                     {"is_reply", t.is_reply},
                     {"hashtag_count", t.hashtag_count},
                     {"url_count", t.url_count},
                     {"mention_count", t.mention_count}};
}

inline void from_json(const nlohmann::json& j, TweetDigest& t) {
  t.posted_at = detail::timestamp_from_json(j, "posted_at");
  j.at("is_retweet").get_to(t.is_retweet);
  j.at("is_reply").get_to(t.is_reply);
  j.at("hashtag_count").get_to(t.hashtag_count);
  j.at("url_count").get_to(t.url_count);
  j.at("mention_count").get_to(t.mention_count);
}

inline void to_json(nlohmann::json& j, const AccountSnapshot& s) {
  j = nlohmann::json{{"account_id", s.account_id},
                     {"screen_name", s.screen_name},
                     {"created_at", format_timestamp(s.created_at)},
                     {"statuses_count", s.statuses_count},
                     {"followers_count", s.followers_count},
                     {"friends_count", s.friends_count},
                     {"favourites_count", s.favourites_count},
                     {"listed_count", s.listed_count},
                     {"verified", s.verified},
                     {"geo_enabled", s.geo_enabled},
                     {"default_profile", s.default_profile},
                     {"default_profile_image", s.default_profile_image},
                     {"description", s.description},
                     {"profile_url_present", s.profile_url_present},
                     {"tweets", s.tweets},
                     {"mentions_collected", s.mentions_collected},
                     {"friend_ids", s.friend_ids}};
  if (s.external_scores) {
    nlohmann::json e = nlohmann::json::object();
    auto put = [&](const char* k, const std::optional<double>& v) {
      e[k] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put("cap", s.external_scores->cap);
    put("score_english", s.external_scores->score_english);
    put("score_universal", s.external_scores->score_universal);
    j["external_scores"] = std::move(e);
  } else {
    j["external_scores"] = nullptr;
  }
}

inline void from_json(const nlohmann::json& j, AccountSnapshot& s) {
  j.at("account_id").get_to(s.account_id);
  j.at("screen_name").get_to(s.screen_name);
  s.created_at = detail::timestamp_from_json(j, "created_at");
  j.at("statuses_count").get_to(s.statuses_count);
  j.at("followers_count").get_to(s.followers_count);
  j.at("friends_count").get_to(s.friends_count);
  j.at("favourites_count").get_to(s.favourites_count);
  j.at("listed_count").get_to(s.listed_count);
  j.at("verified").get_to(s.verified);
  j.at("geo_enabled").get_to(s.geo_enabled);
  j.at("default_profile").get_to(s.default_profile);
  j.at("default_profile_image").get_to(s.default_profile_image);
  j.at("description").get_to(s.description);
  j.at("profile_url_present").get_to(s.profile_url_present);
  j.at("tweets").get_to(s.tweets);
  j.at("mentions_collected").get_to(s.mentions_collected);
  j.at("friend_ids").get_to(s.friend_ids);
  s.external_scores.reset();
  if (const auto it = j.find("external_scores"); it != j.end() && !it->is_null()) {
    ExternalScores e;
    e.cap = detail::optional_real(*it, "cap");
    e.score_english = detail::optional_real(*it, "score_english");
    e.score_universal = detail::optional_real(*it, "score_universal");
    s.external_scores = e;
  }
}

inline std::string snapshot_to_line(const AccountSnapshot& s) { return nlohmann::json(s).dump(); }

inline AccountSnapshot snapshot_from_line(std::string_view line) {
  return nlohmann::json::parse(line).get<AccountSnapshot>();
}

inline void write_snapshots(const std::string& path, std::span<const AccountSnapshot> snapshots) {
  std::string body;
  for (const auto& s : snapshots) {
    body += snapshot_to_line(s);
    body += '\n';
  }
  text::write_file(path, body);
}

// ---------------------------------------------------------------------------
// Corpus loading
// ---------------------------------------------------------------------------

struct CorpusManifest {
  std::string snapshot_path;
  std::optional<std::string> labels_path;
  Timestamp capture_time{};
};

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct LoadResult {
  std::vector<AccountSnapshot> snapshots;
  std::vector<Rejection> rejections;
};

/// Reads every line of the snapshot file. Malformed or invalid records are
/// dropped and reported with their line number; an unreadable file throws.
inline LoadResult load_snapshots(const CorpusManifest& manifest) {
  std::ifstream in(manifest.snapshot_path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot read snapshot file " + manifest.snapshot_path);

  LoadResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    AccountSnapshot s;
    try {
      s = snapshot_from_line(line);
    } catch (const std::exception& e) {
      result.rejections.push_back({line_no, "malformed_record"});
      continue;
    }
    auto violations = validate_snapshot(s, manifest.capture_time);
    if (!violations.empty()) {
      std::string reason = violations.front();
      for (std::size_t i = 1; i < violations.size(); ++i) reason += "|" + violations[i];
      result.rejections.push_back({line_no, std::move(reason)});
      continue;
    }
    if (!ids.insert(s.account_id).second) {
      result.rejections.push_back({line_no, "duplicate_account_id"});
      continue;
    }
    result.snapshots.push_back(std::move(s));
  }
  if (in.bad()) throw Error("io_error", "read failed for " + manifest.snapshot_path);
  return result;
}

inline text::KeyValues rejection_summary(const LoadResult& r) {
  text::KeyValues kv{{"snapshots_loaded", std::to_string(r.snapshots.size())},
                     {"rejections", std::to_string(r.rejections.size())}};
  std::map<std::string, std::size_t> by_reason;
  for (const auto& rej : r.rejections) by_reason[rej.reason]++;
  for (const auto& [reason, n] : by_reason) kv.emplace_back("rejections." + reason, std::to_string(n));
  for (const auto& rej : r.rejections) kv.emplace_back("rejected_line." + std::to_string(rej.line), rej.reason);
  return kv;
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

enum class LabelTask { Bot, Credulity };

struct LabelRecord {
  std::string account_id;
  ClassLabel label = ClassLabel::Negative;
};

inline std::string label_name(ClassLabel label, LabelTask task) {
  const bool pos = label == ClassLabel::Positive;
  if (task == LabelTask::Bot) return pos ? "bot" : "human";
  return pos ? "credulous" : "not_credulous";
}

inline std::optional<ClassLabel> parse_label(std::string_view name) {
  if (name == "bot" || name == "credulous") return ClassLabel::Positive;
  if (name == "human" || name == "not_credulous") return ClassLabel::Negative;
  return std::nullopt;
}

/// Parses `account_id,label` CSV (header required).
inline std::vector<LabelRecord> parse_labels(std::string_view body) {
  std::vector<LabelRecord> out;
  std::size_t start = 0, line_no = 0;
  bool header_seen = false;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "account_id" || fields[1] != "label")
        throw Error("bad_labels_header", "expected 'account_id,label'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty())
      throw Error("bad_label_record", "line " + std::to_string(line_no));
    const auto label = parse_label(fields[1]);
    if (!label) throw Error("bad_label_record", "line " + std::to_string(line_no) + ": unknown label " + fields[1]);
    out.push_back({fields[0], *label});
  }
  return out;
}

inline std::vector<LabelRecord> read_labels(const std::string& path) {
  std::string body;
  try {
    body = text::read_file(path);
  } catch (const std::exception&) {
    throw Error("io_error", "cannot read labels file " + path);
  }
  return parse_labels(body);
}

inline void write_labels(const std::string& path, std::span<const LabelRecord> labels, LabelTask task) {
  std::string body = "account_id,label\n";
  for (const auto& r : labels) body += r.account_id + "," + label_name(r.label, task) + "\n";
  text::write_file(path, body);
}

struct LabeledSnapshot {
  AccountSnapshot snapshot;
  ClassLabel label = ClassLabel::Negative;
};

struct JoinResult {
  std::vector<LabeledSnapshot> pairs;       // snapshot order
  std::vector<std::string> unlabeled;       // snapshots without a label
  std::vector<std::string> missing_snapshots;  // labels without a snapshot
};

/// Inner join on account_id. Duplicate ids in the labels are a hard error.
inline JoinResult join_labels(std::span<const AccountSnapshot> snapshots, std::span<const LabelRecord> labels) {
  std::unordered_map<std::string_view, ClassLabel> by_id;
  by_id.reserve(labels.size());
  for (const auto& r : labels)
    if (!by_id.emplace(r.account_id, r.label).second)
      throw Error("duplicate_label", "account " + r.account_id + " is labeled twice");

  JoinResult out;
  std::unordered_set<std::string_view> matched;
  for (const auto& s : snapshots) {
    const auto it = by_id.find(s.account_id);
    if (it == by_id.end()) {
      out.unlabeled.push_back(s.account_id);
      continue;
    }
    matched.insert(it->first);
    out.pairs.push_back({s, it->second});
  }
  for (const auto& r : labels)
    if (!matched.contains(r.account_id)) out.missing_snapshots.push_back(r.account_id);
  return out;
}

inline text::KeyValues join_summary(const JoinResult& j) {
  text::KeyValues kv{{"joined", std::to_string(j.pairs.size())},
                     {"unlabeled_snapshots", std::to_string(j.unlabeled.size())},
                     {"labels_without_snapshot", std::to_string(j.missing_snapshots.size())}};
  for (const auto& id : j.unlabeled) kv.emplace_back("unlabeled", id);
  for (const auto& id : j.missing_snapshots) kv.emplace_back("missing_snapshot", id);
  return kv;
}

inline constexpr std::uint64_t kDefaultMaxFriends = 400;

/// Human-labeled (bot-task NEGATIVE) snapshots with 1 <= friends_count <= max_friends,
/// in input order.
inline std::vector<AccountSnapshot> filter_eligible_humans(std::span<const LabeledSnapshot> pairs,
                                                           std::uint64_t max_friends = kDefaultMaxFriends) {
  if (max_friends < 1) throw ConfigError("invalid_max_friends", "max_friends must be >= 1");
  std::vector<AccountSnapshot> out;
  for (const auto& p : pairs)
    if (p.label == ClassLabel::Negative && p.snapshot.friends_count >= 1 && p.snapshot.friends_count <= max_friends)
      out.push_back(p.snapshot);
  return out;
}

}  // namespace cred
