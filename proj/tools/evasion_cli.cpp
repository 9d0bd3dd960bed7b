#include "evasion/errors.hpp"
#include "evasion/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeFailure = 3;

struct Flags {
  std::string config;
  evasion::ConfigOverrides overrides;
};

void add_common(CLI::App& cmd, Flags& flags) {
  cmd.add_option("--config", flags.config, "experiment config (JSON)")->required();
  cmd.add_option("--algorithm", flags.overrides.algorithm, "mls, kmls, setsearch or both");
  cmd.add_option("--dim", flags.overrides.dimension, "dimension D");
  cmd.add_option("--epsilon", flags.overrides.epsilon, "target multiplicative accuracy");
  cmd.add_option("--trials", flags.overrides.trials, "number of trials");
  cmd.add_option("--seed", flags.overrides.seed, "master seed");
  cmd.add_option("--out", flags.overrides.output_path, "report path (stdout when absent)");
  cmd.add_option("--format", flags.overrides.format, "jsonl or csv");
}

int run(const Flags& flags) {
  const evasion::ExperimentConfig config = evasion::load_config(flags.config, flags.overrides);
  evasion::validate_config(config);
  const std::vector<evasion::TrialRecord> records = evasion::run_trials(config);
  if (config.output_path) {
    evasion::write_report(records, config.format, *config.output_path);
  } else {
    evasion::emit_report(records, config.format, std::cout);
  }
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed() ? 1 : 0;
  if (failed > 0) {
    std::cerr << fmt::format("{} of {} trials failed\n", failed, records.size());
    return kRuntimeFailure;
  }
  return 0;
}

int mac(const Flags& flags) {
  const evasion::ExperimentConfig config = evasion::load_config(flags.config, flags.overrides);
  std::optional<double> value;
  try {
    value = evasion::analytic_mac(config.classifier, config.cost);
  } catch (const evasion::UsageError& e) {
    throw evasion::ConfigError(e.what());
  }
  if (value) {
    std::cout << fmt::format("{:.12g}\n", *value);
  } else {
    std::cout << "unavailable\n";
  }
  return 0;
}

int check(const Flags& flags) {
  const evasion::ExperimentConfig config = evasion::load_config(flags.config, flags.overrides);
  evasion::validate_config(config);
  std::cout << fmt::format("ok: {} D={} eps={} trials={}\n", evasion::to_string(config.algorithm), config.dimension,
                           config.epsilon, config.trials);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-based evasion experiments against convex-inducing classifiers"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* run_cmd = app.add_subcommand("run", "execute the trials in a config and write a report");
  CLI::App* mac_cmd = app.add_subcommand("mac", "print the analytic minimal adversarial cost");
  CLI::App* check_cmd = app.add_subcommand("check", "validate a config without running it");
  for (CLI::App* cmd : {run_cmd, mac_cmd, check_cmd}) add_common(*cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run_cmd->parsed()) return run(flags);
    if (mac_cmd->parsed()) return mac(flags);
    return check(flags);
  } catch (const evasion::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}
