// Command-line front end: factors, blocking and oracle sweeps written as CSV.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/experiments.hpp"
#include "cellqos/kernels.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::vector<std::string> settings;
  bool resume = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_model) {
  cmd->add_option("--config", flags.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  if (with_model) cmd->add_option("--model", flags.model, "hex or poisson");
  cmd->add_option("--seed", flags.seed, "root seed (u64)");
  cmd->add_option("--out", flags.out, "output CSV path (default: stdout)");
  cmd->add_option("--threads", flags.threads, "worker threads within a cell")->check(CLI::PositiveNumber);
  cmd->add_option("--set", flags.settings, "override a config key, e.g. --set betas=3,4 --set v_dbs=0:2:20")
      ->take_all();
  cmd->add_flag("--resume", flags.resume, "skip cells listed in <out>.done and append");
}

cellqos::ExperimentConfig build_config(cellqos::Experiment experiment, const CommonFlags& flags) {
  auto config = cellqos::default_config(experiment);
  if (!flags.config_path.empty()) cellqos::load_config_file(config, flags.config_path);
  if (flags.model) cellqos::apply_setting(config, "model", *flags.model);
  for (const auto& s : flags.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw cellqos::Error(fmt::format("--set expects key=value, got '{}'", s));
    cellqos::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.threads) config.threads = *flags.threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo QoS pre-metrics and blocking probability for cellular networks"};
  app.require_subcommand(1);

  std::string kernels = "auto";
  app.add_option("--kernels", kernels, "inner-loop kernels: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  CommonFlags factors_flags, blocking_flags, oracle_flags;
  auto* factors = app.add_subcommand("factors", "mean path-loss and interference factors");
  auto* blocking = app.add_subcommand("blocking", "blocking probability");
  auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
  add_common_flags(factors, factors_flags, true);
  add_common_flags(blocking, blocking_flags, true);
  add_common_flags(oracle, oracle_flags, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (kernels == "scalar") cellqos::kernels::set_level(cellqos::kernels::Level::Scalar);
    if (kernels == "avx2") cellqos::kernels::set_level(cellqos::kernels::Level::Avx2);

    cellqos::ExperimentConfig config;
    bool resume = false;
    if (factors->parsed()) {
      config = build_config(cellqos::Experiment::Factors, factors_flags);
      resume = factors_flags.resume;
    } else if (blocking->parsed()) {
      config = build_config(cellqos::Experiment::Blocking, blocking_flags);
      resume = blocking_flags.resume;
    } else {
      config = build_config(cellqos::Experiment::Oracle, oracle_flags);
      resume = oracle_flags.resume;
    }
    cellqos::run_experiment(config, resume, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
