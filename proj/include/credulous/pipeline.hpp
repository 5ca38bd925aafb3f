#pragma once

// Subcommand implementations behind the command-line tool. Every command
// reads a RunConfig, writes only under config.output_dir and refreshes
// <output_dir>/manifest.txt (SHA-256 of every file). Link with OpenSSL::Crypto.

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "credulous/credulity.hpp"
#include "credulous/datamodel.hpp"
#include "credulous/error.hpp"
#include "credulous/eval.hpp"
#include "credulous/features.hpp"
#include "credulous/ingest.hpp"
#include "credulous/learners.hpp"
#include "credulous/report.hpp"
#include "credulous/synth.hpp"
#include "credulous/text.hpp"

namespace cred::pipeline {

namespace fs = std::filesystem;

struct LearnerConfig {
  Algorithm algorithm = Algorithm::RandomForest;
  Hyperparameters hyperparameters;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  std::size_t k = 10;
  std::size_t workers = 1;
  FeatureSetId feature_set = FeatureSetId::AllFeatures;
  ImputationStrategy imputation = ImputationStrategy::ConstantZero;
  std::optional<std::string> manifest;           // defaults to <output_dir>/corpus/manifest.json
  std::optional<std::string> friends_snapshots;  // defaults to the corpus snapshots
  SynthConfig synth;
  std::vector<LearnerConfig> bot_learners{{Algorithm::RandomForest, {}, std::nullopt}};
  HyperparameterGrid tuning_grid;
  std::vector<LearnerConfig> credulous_learners{{Algorithm::OneR, {}, std::nullopt}};
  CredulityRule rule;

  fs::path out() const { return fs::path(output_dir); }
  std::string manifest_path() const { return manifest ? *manifest : (out() / "corpus" / "manifest.json").string(); }
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("invalid_config", where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown_config_key", where + "." + key);
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("invalid_config", where + "." + key + " has the wrong type");
  }
}

inline IntRange get_range(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto v = get_field<std::vector<std::size_t>>(j, key, where);
  if (v.size() != 2) throw ConfigError("invalid_config", where + "." + key + " must be [min, max]");
  return {v[0], v[1]};
}

inline LearnerConfig parse_learner(const nlohmann::json& j, const std::string& where) {
  reject_unknown_keys(j, {"algorithm", "hyperparameters", "seed"}, where);
  LearnerConfig l;
  const auto name = get_field<std::string>(j, "algorithm", where);
  const auto a = parse_algorithm(name);
  if (!a) throw ConfigError("invalid_algorithm", where + ".algorithm = " + name);
  l.algorithm = *a;
  if (j.contains("hyperparameters")) l.hyperparameters = get_field<Hyperparameters>(j, "hyperparameters", where);
  if (j.contains("seed")) l.seed = get_field<std::uint64_t>(j, "seed", where);
  make_learner_spec(l.algorithm, l.hyperparameters, 0);  // validates names and ranges
  return l;
}

inline std::vector<LearnerConfig> parse_learners(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError("invalid_config", where + " must be a non-empty array");
  std::vector<LearnerConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_learner(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline SynthConfig parse_synth(const nlohmann::json& j) {
  const std::string w = "synth";
  reject_unknown_keys(j,
                      {"n_humans", "n_bots", "separation", "credulous_fraction", "credulous_separation",
                       "friends_per_human", "bot_density_credulous", "bot_density_normal", "tweets_per_account",
                       "external_score_fraction", "capture_time", "seed"},
                      w);
  SynthConfig c;
  if (j.contains("n_humans")) c.n_humans = get_field<std::size_t>(j, "n_humans", w);
  if (j.contains("n_bots")) c.n_bots = get_field<std::size_t>(j, "n_bots", w);
  if (j.contains("separation")) c.separation = get_field<double>(j, "separation", w);
  if (j.contains("credulous_fraction")) c.credulous_fraction = get_field<double>(j, "credulous_fraction", w);
  if (j.contains("credulous_separation")) c.credulous_separation = get_field<double>(j, "credulous_separation", w);
  if (j.contains("friends_per_human")) c.friends_per_human = get_range(j, "friends_per_human", w);
  if (j.contains("bot_density_credulous")) c.bot_density_credulous = get_field<double>(j, "bot_density_credulous", w);
  if (j.contains("bot_density_normal")) c.bot_density_normal = get_field<double>(j, "bot_density_normal", w);
  if (j.contains("tweets_per_account")) c.tweets_per_account = get_range(j, "tweets_per_account", w);
  if (j.contains("external_score_fraction"))
    c.external_score_fraction = get_field<double>(j, "external_score_fraction", w);
  if (j.contains("capture_time")) {
    const auto t = parse_timestamp(get_field<std::string>(j, "capture_time", w));
    if (!t) throw ConfigError("invalid_config", "synth.capture_time is not RFC 3339");
    c.capture_time = *t;
  }
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", w);
  validate_synth_config(c);
  return c;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"output_dir", "seed", "k", "workers", "feature_set", "imputation", "corpus", "synth",
                               "bot_learners", "tuning", "credulous_learners", "credulity_rule"},
                              "config");
  const std::string w = "config";
  RunConfig c;
  if (j.contains("output_dir")) c.output_dir = detail::get_field<std::string>(j, "output_dir", w);
  if (j.contains("seed")) c.seed = detail::get_field<std::uint64_t>(j, "seed", w);
  if (j.contains("k")) c.k = detail::get_field<std::size_t>(j, "k", w);
  if (c.k < 2) throw ConfigError("invalid_config", "config.k must be >= 2");
  if (j.contains("workers")) c.workers = std::max<std::size_t>(1, detail::get_field<std::size_t>(j, "workers", w));
  if (j.contains("feature_set")) {
    const auto name = detail::get_field<std::string>(j, "feature_set", w);
    const auto fs = parse_feature_set(name);
    if (!fs) throw ConfigError("invalid_feature_set", "config.feature_set = " + name);
    c.feature_set = *fs;
  }
  if (j.contains("imputation")) {
    const auto name = detail::get_field<std::string>(j, "imputation", w);
    if (name == "constant_zero") c.imputation = ImputationStrategy::ConstantZero;
    else if (name == "training_mean") c.imputation = ImputationStrategy::TrainingMean;
    else throw ConfigError("invalid_imputation", "config.imputation = " + name);
  }
  if (j.contains("corpus")) {
    const auto& cj = j["corpus"];
    detail::reject_unknown_keys(cj, {"manifest", "friends_snapshots"}, "corpus");
    if (cj.contains("manifest")) c.manifest = detail::get_field<std::string>(cj, "manifest", "corpus");
    if (cj.contains("friends_snapshots"))
      c.friends_snapshots = detail::get_field<std::string>(cj, "friends_snapshots", "corpus");
  }
  if (j.contains("synth")) c.synth = detail::parse_synth(j["synth"]);
  if (j.contains("bot_learners")) c.bot_learners = detail::parse_learners(j["bot_learners"], "bot_learners");
  if (j.contains("credulous_learners"))
    c.credulous_learners = detail::parse_learners(j["credulous_learners"], "credulous_learners");
  if (j.contains("tuning")) {
    const auto& tj = j["tuning"];
    detail::reject_unknown_keys(tj, {"grid"}, "tuning");
    if (tj.contains("grid")) c.tuning_grid = detail::get_field<HyperparameterGrid>(tj, "grid", "tuning");
    if (!c.tuning_grid.empty()) enumerate_grid(c.tuning_grid);
  }
  if (j.contains("credulity_rule")) {
    const auto& rj = j["credulity_rule"];
    detail::reject_unknown_keys(rj, {"min_bot_ratio", "min_bot_count", "max_friends"}, "credulity_rule");
    if (rj.contains("min_bot_ratio")) c.rule.min_bot_ratio = detail::get_field<double>(rj, "min_bot_ratio", "credulity_rule");
    if (rj.contains("min_bot_count"))
      c.rule.min_bot_count = detail::get_field<std::size_t>(rj, "min_bot_count", "credulity_rule");
    if (rj.contains("max_friends")) c.rule.max_friends = detail::get_field<std::uint64_t>(rj, "max_friends", "credulity_rule");
    validate_rule(c.rule);
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::string body;
  try {
    body = text::read_file(path);
  } catch (const std::exception&) {
    throw ConfigError("missing_config", "cannot read config file " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const std::exception& e) {
    throw ConfigError("invalid_config", path + ": " + e.what());
  }
  return parse_run_config(j);
}

// ---------------------------------------------------------------------------
// Output manifest
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("hash_failed", "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

inline constexpr const char* kOutputManifest = "manifest.txt";

/// Rewrites <dir>/manifest.txt: "<sha256>  <relative path>" per file, sorted by path.
inline void write_output_manifest(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) {
      auto rel = fs::relative(e.path(), dir).generic_string();
      if (rel != kOutputManifest) files.push_back(std::move(rel));
    }
  std::sort(files.begin(), files.end());
  std::string body;
  for (const auto& f : files) body += sha256_hex(text::read_file((dir / f).string())) + "  " + f + "\n";
  text::write_file((dir / kOutputManifest).string(), body);
}

// ---------------------------------------------------------------------------
// Shared loading steps
// ---------------------------------------------------------------------------

struct Corpus {
  CorpusManifest manifest;
  LoadResult loaded;
  std::vector<LabelRecord> labels;
  JoinResult joined;
};

inline Corpus load_corpus(const RunConfig& cfg) {
  const auto path = cfg.manifest_path();
  if (!fs::exists(path)) throw ConfigError("missing_corpus", "corpus manifest not found: " + path);
  Corpus c;
  c.manifest = read_manifest(path);
  if (!c.manifest.labels_path) throw ConfigError("missing_labels", "corpus manifest has no labels_path");
  c.loaded = load_snapshots(c.manifest);
  c.labels = read_labels(*c.manifest.labels_path);
  c.joined = join_labels(c.loaded.snapshots, c.labels);
  return c;
}

inline ImputationPolicy imputation_for(const RunConfig& cfg, std::span<const LabeledSnapshot> training) {
  if (cfg.imputation == ImputationStrategy::ConstantZero) return {};
  std::vector<AccountSnapshot> snaps;
  for (const auto& p : training) snaps.push_back(p.snapshot);
  return fit_training_mean_policy(snaps);
}

inline std::string render_policy(const ImputationPolicy& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, strategy] : p.strategy)
    j[name] = {{"strategy", strategy == ImputationStrategy::ConstantZero ? "constant_zero" : "training_mean"},
               {"value", p.constants.count(name) ? p.constants.at(name) : 0.0}};
  return j.dump(2) + "\n";
}

inline ImputationPolicy parse_policy(std::string_view body) {
  ImputationPolicy p;
  try {
    const auto j = nlohmann::json::parse(body);
    for (const auto& [name, entry] : j.items()) {
      const auto s = entry.at("strategy").get<std::string>();
      p.strategy[name] = s == "training_mean" ? ImputationStrategy::TrainingMean : ImputationStrategy::ConstantZero;
      p.constants[name] = entry.at("value").get<double>();
    }
  } catch (const std::exception& e) {
    throw Error("bad_imputation_file", e.what());
  }
  return p;
}

inline Dataset bot_dataset(const RunConfig& cfg, const Corpus& corpus, const ImputationPolicy& policy) {
  std::vector<LabeledAccount> accounts;
  for (const auto& p : corpus.joined.pairs) accounts.push_back({&p.snapshot, p.label});
  return build_dataset(cfg.feature_set, accounts, corpus.manifest.capture_time, policy);
}

inline LearnerSpec spec_for(const LearnerConfig& l, const RunConfig& cfg) {
  return make_learner_spec(l.algorithm, l.hyperparameters, l.seed.value_or(cfg.seed));
}

inline void log(const std::string& msg) { std::cerr << "[credulous] " << msg << "\n"; }

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline void cmd_synth(const RunConfig& cfg) {
  const auto corpus = generate_corpus(cfg.synth);
  const auto files = write_corpus(corpus, cfg.out() / "corpus");
  log("synth: " + std::to_string(corpus.snapshots.size()) + " accounts, " +
      std::to_string(corpus.planted_credulous.size()) + " planted credulous -> " + files.manifest);
  write_output_manifest(cfg.out());
}

inline void cmd_ingest_check(const RunConfig& cfg) {
  const auto corpus = load_corpus(cfg);
  const auto eligible = filter_eligible_humans(corpus.joined.pairs, cfg.rule.max_friends);
  fs::create_directories(cfg.out() / "ingest");
  auto kv = rejection_summary(corpus.loaded);
  for (auto& e : join_summary(corpus.joined)) kv.push_back(std::move(e));
  kv.emplace_back("eligible_humans", std::to_string(eligible.size()));
  kv.emplace_back("max_friends", std::to_string(cfg.rule.max_friends));
  text::write_file((cfg.out() / "ingest" / "summary.txt").string(), text::render_key_values(kv));
  log("ingest-check: " + std::to_string(corpus.loaded.snapshots.size()) + " snapshots, " +
      std::to_string(corpus.loaded.rejections.size()) + " rejected, " + std::to_string(corpus.joined.pairs.size()) +
      " labeled, " + std::to_string(eligible.size()) + " eligible humans");
  write_output_manifest(cfg.out());
}

inline void cmd_extract(const RunConfig& cfg) {
  const auto corpus = load_corpus(cfg);
  const auto policy = imputation_for(cfg, corpus.joined.pairs);
  const auto d = bot_dataset(cfg, corpus, policy);
  fs::create_directories(cfg.out() / "features");
  const auto path = cfg.out() / "features" / (std::string(feature_set_name(cfg.feature_set)) + ".csv");
  text::write_file(path.string(), render_feature_matrix(d, true, LabelTask::Bot));
  log("extract: " + std::to_string(d.size()) + " rows -> " + path.string());
  write_output_manifest(cfg.out());
}

inline void cmd_train_bot(const RunConfig& cfg) {
  const auto corpus = load_corpus(cfg);
  const auto policy = imputation_for(cfg, corpus.joined.pairs);
  const auto d = bot_dataset(cfg, corpus, policy);
  CvOptions cv;
  cv.workers = cfg.workers;

  std::vector<EvalReport> reports;
  std::size_t winner = 0;
  for (std::size_t i = 0; i < cfg.bot_learners.size(); ++i) {
    const auto spec = spec_for(cfg.bot_learners[i], cfg);
    reports.push_back(cross_validate(spec, d, cfg.k, cfg.seed, cv));
    log("train-bot: " + std::string(algorithm_name(spec.algorithm)) +
        " accuracy = " + text::format_real(reports.back().mean.accuracy_percent));
    if (reports[i].mean.accuracy_percent > reports[winner].mean.accuracy_percent) winner = i;
  }

  auto final_spec = spec_for(cfg.bot_learners[winner], cfg);
  text::KeyValues kv{{"learners", std::to_string(reports.size())},
                     {"winner", std::to_string(winner)},
                     {"winner.algorithm", std::string(algorithm_name(final_spec.algorithm))}};
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (auto& e : report_key_values(reports[i], "learner." + std::to_string(i) + ".")) kv.push_back(std::move(e));

  // Tune only the hyperparameters the winning algorithm accepts.
  HyperparameterGrid grid;
  const auto accepted = default_hyperparameters(final_spec.algorithm);
  for (const auto& [name, values] : cfg.tuning_grid)
    if (accepted.contains(name)) grid[name] = values;
  if (!grid.empty()) {
    const auto tuned = grid_search(final_spec.algorithm, grid, d, cfg.k, final_spec.seed,
                                   final_spec.hyperparameters, cv);
    final_spec = make_learner_spec(final_spec.algorithm, tuned.best, final_spec.seed);
    kv.emplace_back("tuned.grid_points", std::to_string(tuned.evaluated.size()));
    for (const auto& [name, v] : tuned.best) kv.emplace_back("tuned.hyperparameter." + name, text::format_real(v));
    for (auto& e : report_key_values(tuned.report, "tuned.")) kv.push_back(std::move(e));
    log("train-bot: tuned accuracy = " + text::format_real(tuned.report.mean.accuracy_percent));
  }

  const auto model = fit(final_spec, d, FitOptions{cfg.workers});
  const auto dir = cfg.out() / "bot";
  fs::create_directories(dir);
  text::write_file((dir / "model.json").string(), serialize_model(model));
  text::write_file((dir / "imputation.json").string(), render_policy(policy));
  text::write_file((dir / "report.txt").string(), text::render_key_values(kv));
  text::write_file((dir / "table.txt").string(), render_results_table(reports));
  std::cout << render_results_table(reports);
  write_output_manifest(cfg.out());
}

struct BotModelFiles {
  TrainedModel model;
  ImputationPolicy policy;
};

inline BotModelFiles load_bot_model(const RunConfig& cfg) {
  const auto model_path = cfg.out() / "bot" / "model.json";
  if (!fs::exists(model_path)) throw ConfigError("missing_model", "bot model not found: " + model_path.string());
  BotModelFiles f{deserialize_model(text::read_file(model_path.string()), feature_set_name(cfg.feature_set)), {}};
  const auto policy_path = cfg.out() / "bot" / "imputation.json";
  if (fs::exists(policy_path)) f.policy = parse_policy(text::read_file(policy_path.string()));
  return f;
}

inline std::string render_friend_labels(const FriendBotLabels& labels) {
  std::string out = "account_id,friend_id,label\n";
  for (const auto& [account, friends] : labels)
    for (const auto& [fid, label] : friends) out += account + "," + fid + "," + label_name(label, LabelTask::Bot) + "\n";
  return out;
}

inline FriendBotLabels parse_friend_labels(std::string_view body) {
  FriendBotLabels out;
  std::size_t start = 0, line_no = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (++line_no == 1) continue;
    const auto f = text::split_csv(line);
    const auto label = f.size() == 3 ? parse_label(f[2]) : std::nullopt;
    if (!label) throw Error("bad_friend_labels", "line " + std::to_string(line_no));
    out[f[0]][f[1]] = *label;
  }
  return out;
}

inline std::vector<AccountSnapshot> eligible_humans(const RunConfig& cfg, const Corpus& corpus) {
  return filter_eligible_humans(corpus.joined.pairs, cfg.rule.max_friends);
}

inline void cmd_label_friends(const RunConfig& cfg) {
  const auto bot = load_bot_model(cfg);
  const auto corpus = load_corpus(cfg);
  const auto humans = eligible_humans(cfg, corpus);
  std::vector<AccountSnapshot> friend_pool;
  if (cfg.friends_snapshots) {
    CorpusManifest fm{*cfg.friends_snapshots, std::nullopt, corpus.manifest.capture_time};
    friend_pool = load_snapshots(fm).snapshots;
  } else {
    friend_pool = corpus.loaded.snapshots;
  }
  const auto labels = label_friends(bot.model, humans, friend_pool, cfg.feature_set, corpus.manifest.capture_time,
                                    bot.policy);
  fs::create_directories(cfg.out() / "credulous");
  text::write_file((cfg.out() / "credulous" / "friend_labels.csv").string(), render_friend_labels(labels));
  log("label-friends: labeled friends of " + std::to_string(labels.size()) + " eligible humans");
  write_output_manifest(cfg.out());
}

inline std::string describe_rule(const CredulityRule& r) {
  return "min_bot_ratio=" + text::format_real(r.min_bot_ratio) + " min_bot_count=" + std::to_string(r.min_bot_count) +
         " max_friends=" + std::to_string(r.max_friends);
}

inline void cmd_ground_truth(const RunConfig& cfg) {
  const auto labels_path = cfg.out() / "credulous" / "friend_labels.csv";
  if (!fs::exists(labels_path)) throw ConfigError("missing_friend_labels", labels_path.string());
  const auto labels = parse_friend_labels(text::read_file(labels_path.string()));
  const auto corpus = load_corpus(cfg);
  const auto humans = eligible_humans(cfg, corpus);
  const auto gt = derive_ground_truth(humans, labels, cfg.rule);
  fs::create_directories(cfg.out() / "credulous");
  text::write_file((cfg.out() / "credulous" / "ground_truth.csv").string(), render_ground_truth(gt));
  const auto n = gt.credulous_count();
  text::KeyValues kv{{"eligible_humans", std::to_string(gt.ranking.size())},
                     {"credulous", std::to_string(n)},
                     {"not_credulous", std::to_string(gt.ranking.size() - n)},
                     {"rule.min_bot_ratio", text::format_real(cfg.rule.min_bot_ratio)},
                     {"rule.min_bot_count", std::to_string(cfg.rule.min_bot_count)},
                     {"rule.max_friends", std::to_string(cfg.rule.max_friends)}};
  text::write_file((cfg.out() / "credulous" / "ground_truth_summary.txt").string(), text::render_key_values(kv));
  log("ground-truth: " + std::to_string(n) + " credulous of " + std::to_string(gt.ranking.size()));
  write_output_manifest(cfg.out());
  if (n == 0) throw ConfigError("empty_credulous_class", "no credulous users under rule " + describe_rule(cfg.rule));
  if (n == gt.ranking.size())
    throw ConfigError("empty_not_credulous_class", "every user is credulous under rule " + describe_rule(cfg.rule));
}

inline void cmd_train_credulous(const RunConfig& cfg) {
  const auto gt_path = cfg.out() / "credulous" / "ground_truth.csv";
  if (!fs::exists(gt_path)) throw ConfigError("missing_ground_truth", gt_path.string());
  const auto gt = parse_ground_truth(text::read_file(gt_path.string()));
  const auto corpus = load_corpus(cfg);
  const auto humans = eligible_humans(cfg, corpus);
  const auto truth = gt.labels();

  std::vector<LabeledAccount> accounts;
  for (const auto& h : humans) {
    const auto it = truth.find(h.account_id);
    if (it == truth.end()) throw Error("ground_truth_mismatch", "no ground truth for " + h.account_id);
    accounts.push_back({&h, it->second});
  }
  std::vector<LabeledSnapshot> training;
  for (const auto& h : humans) training.push_back({h, ClassLabel::Negative});
  const auto d = build_dataset(cfg.feature_set, accounts, corpus.manifest.capture_time, imputation_for(cfg, training));
  const auto counts = dataset_class_counts(d);
  if (counts.positives == 0) throw ConfigError("empty_credulous_class", "no credulous users under rule " + describe_rule(cfg.rule));
  if (counts.negatives == 0)
    throw ConfigError("empty_not_credulous_class", "every user is credulous under rule " + describe_rule(cfg.rule));

  const auto plan = plan_undersampling_folds(d, cfg.seed);
  CvOptions cv;
  cv.workers = cfg.workers;
  std::vector<CredulousReport> reports;
  text::KeyValues kv{{"learners", std::to_string(cfg.credulous_learners.size())},
                     {"credulous", std::to_string(plan.credulous.size())},
                     {"partitions", std::to_string(plan.partitions.size())}};
  std::string tables;
  for (std::size_t i = 0; i < cfg.credulous_learners.size(); ++i) {
    const auto spec = spec_for(cfg.credulous_learners[i], cfg);
    reports.push_back(train_credulous(spec, d, plan, cfg.k, cfg.seed, cv));
    for (auto& [key, value] : credulous_report_key_values(reports.back()))
      kv.emplace_back("learner." + std::to_string(i) + "." + key, std::move(value));
    tables += "\n" + render_partition_table(reports.back());
    log("train-credulous: " + std::string(algorithm_name(spec.algorithm)) +
        " accuracy = " + text::format_real(reports.back().mean.accuracy_percent) +
        " sigma = " + text::format_real(reports.back().stddev.accuracy_percent));
  }
  std::string plan_body = "partition,account_id\n";
  for (std::size_t p = 0; p < plan.partitions.size(); ++p)
    for (const auto& id : plan.partitions[p]) plan_body += std::to_string(p) + "," + id + "\n";

  const auto dir = cfg.out() / "credulous";
  text::write_file((dir / "fold_plan.csv").string(), plan_body);
  text::write_file((dir / "report.txt").string(), text::render_key_values(kv));
  const auto table = render_results_table(reports) + tables;
  text::write_file((dir / "table.txt").string(), table);
  std::cout << table;
  write_output_manifest(cfg.out());
}

inline void cmd_credulous(const RunConfig& cfg) {
  cmd_label_friends(cfg);
  cmd_ground_truth(cfg);
  cmd_train_credulous(cfg);
}

/// Re-renders the tables of whatever reports exist under the output directory.
inline std::string cmd_report(const RunConfig& cfg) {
  std::string out;
  const auto bot_path = cfg.out() / "bot" / "report.txt";
  if (fs::exists(bot_path)) {
    const auto kv = text::parse_key_values(text::read_file(bot_path.string()));
    std::vector<EvalReport> reports;
    std::size_t n = 0;
    for (const auto& [k, v] : kv)
      if (k == "learners") n = static_cast<std::size_t>(std::stoul(v));
    for (std::size_t i = 0; i < n; ++i) reports.push_back(report_from_key_values(kv, "learner." + std::to_string(i) + "."));
    out += "Bot detection\n" + render_results_table(reports);
  }
  const auto cred_path = cfg.out() / "credulous" / "report.txt";
  if (fs::exists(cred_path)) {
    const auto kv = text::parse_key_values(text::read_file(cred_path.string()));
    std::size_t n = 0;
    for (const auto& [k, v] : kv)
      if (k == "learners") n = static_cast<std::size_t>(std::stoul(v));
    std::vector<CredulousReport> reports;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string prefix = "learner." + std::to_string(i) + ".";
      text::KeyValues sub;
      for (const auto& [k, v] : kv)
        if (k.rfind(prefix, 0) == 0) sub.emplace_back(k.substr(prefix.size()), v);
      reports.push_back(credulous_report_from_key_values(sub));
    }
    if (!out.empty()) out += "\n";
    out += "Credulous detection\n" + render_results_table(reports);
    for (const auto& r : reports) out += "\n" + render_partition_table(r);
  }
  if (out.empty()) throw ConfigError("missing_reports", "no reports under " + cfg.output_dir);
  fs::create_directories(cfg.out());
  text::write_file((cfg.out() / "report.txt").string(), out);
  write_output_manifest(cfg.out());
  return out;
}

}  // namespace cred::pipeline
