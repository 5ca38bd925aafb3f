// credulous: command-line driver for the credulous-user detection pipeline.
//
//   credulous <subcommand> --config run.json [--out DIR] [--seed N] [--workers N] [--feature-set NAME]
//
// Exit codes: 0 success, 1 runtime error, 2 configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "credulous/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> feature_set;
};

cred::pipeline::RunConfig resolve(const Overrides& o) {
  auto cfg = cred::pipeline::load_run_config(o.config);
  if (o.out) cfg.output_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = std::max<std::size_t>(1, *o.workers);
  if (o.feature_set) {
    const auto fs = cred::parse_feature_set(*o.feature_set);
    if (!fs) throw cred::ConfigError("invalid_feature_set", "--feature-set = " + *o.feature_set);
    cfg.feature_set = *fs;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Credulous Twitter user detection pipeline"};
  app.require_subcommand(1);
  Overrides o;

  using Command = void (*)(const cred::pipeline::RunConfig&);
  const std::vector<std::pair<std::string, Command>> commands{
      {"synth", cred::pipeline::cmd_synth},
      {"ingest-check", cred::pipeline::cmd_ingest_check},
      {"extract", cred::pipeline::cmd_extract},
      {"train-bot", cred::pipeline::cmd_train_bot},
      {"label-friends", cred::pipeline::cmd_label_friends},
      {"ground-truth", cred::pipeline::cmd_ground_truth},
      {"train-credulous", cred::pipeline::cmd_train_credulous},
      {"credulous", cred::pipeline::cmd_credulous},
      {"report", [](const cred::pipeline::RunConfig& c) { std::cout << cred::pipeline::cmd_report(c); }},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", o.config, "JSON run configuration")->required();
    sub->add_option("-o,--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", o.seed, "master seed (overrides seed)");
    sub->add_option("--workers", o.workers, "worker thread cap (overrides workers)");
    sub->add_option("--feature-set", o.feature_set, "class_a_minus | botometer_plus | all_features");
    subs.emplace_back(sub, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto cfg = resolve(o);
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) fn(cfg);
    return 0;
  } catch (const cred::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
