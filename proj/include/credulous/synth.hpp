#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/ingest.hpp"
#include "credulous/random.hpp"
#include "credulous/text.hpp"

namespace cred {

struct IntRange {
  std::size_t min = 0;
  std::size_t max = 0;
};

struct SynthConfig {
  std::size_t n_humans = 1000;
  std::size_t n_bots = 1000;
  // Bot/human shift of every generated attribute, in within-class standard deviations.
  double separation = 3.0;
  double credulous_fraction = 0.1;
  // Shift of followers_count (down) and friends_count (up) for planted
  // credulous humans, in within-class standard deviations.
  double credulous_separation = 2.0;
  IntRange friends_per_human{20, 400};
  double bot_density_credulous = 0.6;
  double bot_density_normal = 0.05;
  IntRange tweets_per_account{0, 40};
  double external_score_fraction = 0.8;
  Timestamp capture_time = *parse_timestamp("2020-01-01T00:00:00Z");
  std::uint64_t seed = 1;
};

/// Throws ConfigError naming the first offending field.
inline void validate_synth_config(const SynthConfig& c) {
  auto fail = [](const char* field, const std::string& why) { throw ConfigError("invalid_" + std::string(field), why); };
  auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!(std::isfinite(c.separation) && c.separation >= 0)) fail("separation", "separation must be >= 0");
  if (!(std::isfinite(c.credulous_separation) && c.credulous_separation >= 0))
    fail("credulous_separation", "credulous_separation must be >= 0");
  if (!unit(c.credulous_fraction)) fail("credulous_fraction", "credulous_fraction must lie in [0, 1]");
  if (!unit(c.bot_density_credulous)) fail("bot_density_credulous", "bot_density_credulous must lie in [0, 1]");
  if (!unit(c.bot_density_normal)) fail("bot_density_normal", "bot_density_normal must lie in [0, 1]");
  if (!unit(c.external_score_fraction)) fail("external_score_fraction", "must lie in [0, 1]");
  if (c.credulous_fraction > 0 && !(c.bot_density_credulous > c.bot_density_normal))
    fail("bot_density_credulous", "bot_density_credulous must exceed bot_density_normal when credulous_fraction > 0");
  if (c.friends_per_human.min < 1 || c.friends_per_human.min > c.friends_per_human.max)
    fail("friends_per_human", "friends_per_human needs 1 <= min <= max");
  if (c.friends_per_human.max > kMaxFriendIds) fail("friends_per_human", "friends_per_human.max exceeds the 5000 cap");
  if (c.tweets_per_account.min > c.tweets_per_account.max || c.tweets_per_account.max > kMaxTweets)
    fail("tweets_per_account", "tweets_per_account needs min <= max <= 3200");
  if (c.n_humans == 0) fail("n_humans", "n_humans must be >= 1");
}

struct SynthCorpus {
  std::vector<AccountSnapshot> snapshots;  // humans first, then bots
  std::vector<LabelRecord> labels;         // bot task
  std::vector<std::string> planted_credulous;
  Timestamp capture_time{};
};

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::uint64_t clamp_count(double v, double lo, double hi) {
  return static_cast<std::uint64_t>(std::llround(std::clamp(v, lo, hi)));
}

/// Draws from the shared archetype; `shift` is +separation for bots, 0 for humans.
class ArchetypeSampler {
 public:
  ArchetypeSampler(Rng& rng, double shift) : rng_(rng), shift_(shift) {}

  // Standard normal moved by shift * direction.
  double z(double direction) { return standard_normal(rng_) + shift_ * direction; }
  bool flag(double threshold, double direction) { return z(direction) > threshold; }

 private:
  Rng& rng_;
  double shift_;
};

inline std::string make_screen_name(Rng& rng, std::size_t length, std::size_t digits) {
  std::string name;
  for (std::size_t i = 0; i + digits < length; ++i) name += static_cast<char>('a' + uniform_index(rng, 26));
  for (std::size_t i = 0; i < digits; ++i) name += static_cast<char>('0' + uniform_index(rng, 10));
  return name;
}

inline std::string make_description(std::size_t length) {
  static constexpr std::string_view kFiller = "just another account sharing thoughts about news sports music and life ";
  std::string out;
  while (out.size() < length) out += kFiller.substr(0, std::min(kFiller.size(), length - out.size()));
  return out;
}

/// k distinct values from [0, n) (Floyd's algorithm), excluding `skip` when set.
inline std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k,
                                                std::optional<std::size_t> skip = std::nullopt) {
  const std::size_t pool = skip ? n - 1 : n;
  std::unordered_set<std::size_t> chosen;
  std::vector<std::size_t> out;
  for (std::size_t j = pool - k; j < pool; ++j) {
    const auto t = static_cast<std::size_t>(uniform_index(rng, j + 1));
    const auto pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  if (skip)
    for (auto& v : out)
      if (v >= *skip) ++v;
  return out;
}

}  // namespace detail

/// Seeded bot/human corpus with planted credulous humans. Account i draws
/// from its own substream derive_seed(seed, i); friend lists from a second
/// family of substreams.
inline SynthCorpus generate_corpus(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  if (cfg.friends_per_human.max > cfg.n_bots || cfg.friends_per_human.max > cfg.n_humans - 1)
    throw Error("infeasible_friend_counts", "friends_per_human.max = " + std::to_string(cfg.friends_per_human.max) +
                                                " exceeds the bot population (" + std::to_string(cfg.n_bots) +
                                                ") or the other humans (" + std::to_string(cfg.n_humans - 1) + ")");
  using namespace std::chrono;
  SynthCorpus corpus;
  corpus.capture_time = cfg.capture_time;

  const auto n_planted = static_cast<std::size_t>(std::floor(cfg.credulous_fraction * static_cast<double>(cfg.n_humans)));
  std::vector<std::size_t> human_order(cfg.n_humans);
  for (std::size_t i = 0; i < cfg.n_humans; ++i) human_order[i] = i;
  {
    Rng rng(derive_seed(cfg.seed, 0xC0FFEE));
    shuffle(std::span<std::size_t>(human_order), rng);
  }
  std::vector<bool> planted(cfg.n_humans, false);
  for (std::size_t i = 0; i < n_planted; ++i) planted[human_order[i]] = true;

  auto human_id = [](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "h%06zu", i);
    return std::string(buf);
  };
  auto bot_id = [](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "b%06zu", i);
    return std::string(buf);
  };

  const double log_lo = std::log(static_cast<double>(cfg.friends_per_human.min));
  const double log_hi = std::log(static_cast<double>(cfg.friends_per_human.max));
  const double friends_mid = (log_lo + log_hi) / 2.0;
  const double friends_sd = (log_hi - log_lo) / 8.0;
  const double tweets_mid = (static_cast<double>(cfg.tweets_per_account.min) + static_cast<double>(cfg.tweets_per_account.max)) / 2.0;
  const double tweets_sd = (static_cast<double>(cfg.tweets_per_account.max) - static_cast<double>(cfg.tweets_per_account.min)) / 4.0;

  const std::size_t total = cfg.n_humans + cfg.n_bots;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const bool is_bot = idx >= cfg.n_humans;
    const std::size_t local = is_bot ? idx - cfg.n_humans : idx;
    const bool credulous = !is_bot && planted[local];
    Rng rng(derive_seed(cfg.seed, idx));
    detail::ArchetypeSampler a(rng, is_bot ? cfg.separation : 0.0);
    const double cred_shift = credulous ? cfg.credulous_separation : 0.0;

    AccountSnapshot s;
    s.account_id = is_bot ? bot_id(local) : human_id(local);
    const double age_days = std::clamp(std::exp(std::log(1500.0) + 0.5 * a.z(-1.0)), 30.0, 5000.0);
    const auto age_whole_days = static_cast<std::int64_t>(age_days);
    s.created_at = cfg.capture_time - days{age_whole_days};
    s.statuses_count = detail::clamp_count(std::expm1(std::log(2000.0) + a.z(+1.0)), 0, 1e9);
    s.followers_count = detail::clamp_count(std::expm1(5.0 + a.z(-1.0) - cred_shift), 0, 1e9);
    s.friends_count = detail::clamp_count(std::exp(friends_mid + friends_sd * (a.z(+1.0) + cred_shift)),
                                          static_cast<double>(cfg.friends_per_human.min),
                                          static_cast<double>(cfg.friends_per_human.max));
    s.favourites_count = detail::clamp_count(std::expm1(6.0 + 1.2 * a.z(-1.0)), 0, 1e9);
    s.listed_count = detail::clamp_count(std::expm1(1.5 + a.z(-1.0)), 0, 1e9);
    s.default_profile = a.flag(0.524, +1.0);
    s.default_profile_image = a.flag(1.645, +1.0);
    const auto description_length = detail::clamp_count(60.0 + 40.0 * a.z(-1.0), 0, 160);
    s.description = detail::make_description(description_length);
    s.profile_url_present = a.flag(0.0, -1.0);
    s.verified = a.flag(2.0, -1.0);
    s.geo_enabled = a.flag(0.25, -1.0);
    const auto name_length = detail::clamp_count(10.0 + 2.0 * a.z(-1.0), 3, 15);
    const auto name_digits = detail::clamp_count(1.0 + 1.5 * a.z(+1.0), 0, static_cast<double>(name_length));
    s.screen_name = detail::make_screen_name(rng, name_length, name_digits);
    s.mentions_collected = static_cast<std::uint32_t>(detail::clamp_count(50.0 + 25.0 * a.z(+1.0), 0, kMaxMentions));

    // Activity digest.
    const auto n_tweets = detail::clamp_count(tweets_mid + tweets_sd * a.z(+1.0),
                                              static_cast<double>(cfg.tweets_per_account.min),
                                              static_cast<double>(cfg.tweets_per_account.max));
    const double p_retweet = detail::logistic(-1.0 + 0.8 * a.z(+1.0));
    const double p_reply = detail::logistic(-1.5 + 0.8 * a.z(-1.0));
    const double p_hashtag = detail::logistic(-1.5 + 0.8 * a.z(+1.0));
    const double p_url = detail::logistic(-1.5 + 0.8 * a.z(+1.0));
    const double p_mention = detail::logistic(-1.0 + 0.8 * a.z(-1.0));
    const auto active_hours = detail::clamp_count(12.0 + 4.0 * a.z(-1.0), 1, 24);
    const auto first_hour = uniform_index(rng, 24);
    for (std::uint64_t t = 0; t < n_tweets; ++t) {
      TweetDigest d;
      const auto day = 1 + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(age_whole_days - 1)));
      const auto hour = (first_hour + uniform_index(rng, active_hours)) % 24;
      const auto minute = uniform_index(rng, 60);
      d.posted_at = s.created_at + days{day} + hours{hour} + minutes{minute};
      if (d.posted_at > cfg.capture_time) d.posted_at = cfg.capture_time;
      d.is_retweet = bernoulli(rng, p_retweet);
      d.is_reply = bernoulli(rng, p_reply);
      d.hashtag_count = static_cast<std::uint32_t>(binomial(rng, 4, p_hashtag));
      d.url_count = static_cast<std::uint32_t>(binomial(rng, 2, p_url));
      d.mention_count = static_cast<std::uint32_t>(binomial(rng, 3, p_mention));
      s.tweets.push_back(d);
    }

    const bool has_scores = bernoulli(rng, cfg.external_score_fraction);
    const double cap = detail::logistic(-2.0 + a.z(+1.0));
    const double english = 1.0 + 0.8 * a.z(+1.0);
    const double universal = 1.0 + 0.8 * a.z(+1.0);
    if (has_scores) s.external_scores = ExternalScores{cap, english, universal};

    corpus.labels.push_back({s.account_id, is_bot ? ClassLabel::Positive : ClassLabel::Negative});
    if (credulous) corpus.planted_credulous.push_back(s.account_id);
    corpus.snapshots.push_back(std::move(s));
  }

  // Friend lists: each friend is a bot with probability equal to the group's density.
  for (std::size_t h = 0; h < cfg.n_humans; ++h) {
    Rng rng(derive_seed(cfg.seed ^ 0x5eed5eed5eed5eedULL, h));
    auto& s = corpus.snapshots[h];
    const auto n_friends = static_cast<std::size_t>(s.friends_count);
    const double density = planted[h] ? cfg.bot_density_credulous : cfg.bot_density_normal;
    const auto n_bot_friends = static_cast<std::size_t>(binomial(rng, n_friends, density));
    for (auto b : detail::sample_distinct(rng, cfg.n_bots, n_bot_friends))
      s.friend_ids.push_back(corpus.snapshots[cfg.n_humans + b].account_id);
    for (auto o : detail::sample_distinct(rng, cfg.n_humans, n_friends - n_bot_friends, h))
      s.friend_ids.push_back(corpus.snapshots[o].account_id);
    std::sort(s.friend_ids.begin(), s.friend_ids.end());
  }
  std::sort(corpus.planted_credulous.begin(), corpus.planted_credulous.end());
  return corpus;
}

struct CorpusFiles {
  std::string snapshots;
  std::string labels;
  std::string planted;
  std::string manifest;
};

inline std::string render_manifest(const CorpusManifest& m) {
  nlohmann::json j{{"snapshot_path", m.snapshot_path}, {"capture_time", format_timestamp(m.capture_time)}};
  j["labels_path"] = m.labels_path ? nlohmann::json(*m.labels_path) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

/// Reads a corpus manifest; relative paths resolve against the manifest's directory.
inline CorpusManifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const std::exception& e) {
    throw Error("bad_manifest", path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };
  CorpusManifest m;
  try {
    m.snapshot_path = resolve(j.at("snapshot_path").get<std::string>());
    if (j.contains("labels_path") && !j["labels_path"].is_null())
      m.labels_path = resolve(j["labels_path"].get<std::string>());
    const auto t = parse_timestamp(j.at("capture_time").get<std::string>());
    if (!t) throw Error("bad_manifest", "capture_time is not RFC 3339");
    m.capture_time = *t;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("bad_manifest", e.what());
  }
  return m;
}

/// Writes snapshots.jsonl, labels.csv, planted_credulous.csv and manifest.json into `dir`.
inline CorpusFiles write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CorpusFiles f{(dir / "snapshots.jsonl").string(), (dir / "labels.csv").string(),
                (dir / "planted_credulous.csv").string(), (dir / "manifest.json").string()};
  write_snapshots(f.snapshots, corpus.snapshots);
  write_labels(f.labels, corpus.labels, LabelTask::Bot);
  std::string planted = "account_id\n";
  for (const auto& id : corpus.planted_credulous) planted += id + "\n";
  text::write_file(f.planted, planted);
  text::write_file(f.manifest, render_manifest({"snapshots.jsonl", std::string("labels.csv"), corpus.capture_time}));
  return f;
}

}  // namespace cred
