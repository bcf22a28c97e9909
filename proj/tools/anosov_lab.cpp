// anosov-lab <subcommand> --config <path> [--out <dir>] [--seed <u64>]
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "anosov/harness/config.hpp"
#include "anosov/harness/experiments.hpp"

extern char** environ;

namespace {

std::map<std::string, std::string> environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return env;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace anosov;
  CLI::App app{"Numerical experiments on a perturbed toral automorphism"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool serial = false, print_config = false;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "key=value config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides run.out)");
    sub->add_option("--seed", seed, "64-bit seed (overrides run.seed)");
    sub->add_flag("--serial", serial, "run the serial reference kernels");
    sub->add_flag("--print-config", print_config, "print the effective config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();

  RunContext ctx;
  try {
    ctx.cfg = load_config(config_path);
    for (const auto& key : apply_env(ctx.cfg, environment())) std::cerr << "env override: " << key << "\n";
    if (sub->count("--out")) ctx.cfg.out = out_dir;
    if (sub->count("--seed")) ctx.cfg.seed = seed;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (print_config) {
    std::cout << to_text(ctx.cfg);
    return 0;
  }
  ctx.out = ctx.cfg.out;
  ctx.log = &std::cerr;
  ctx.exec = serial ? Exec::Serial : Exec::Parallel;

  try {
    const auto outcome = run_subcommand(name, ctx);
    for (const auto& p : outcome.problems) std::cerr << "numeric problem: " << p << "\n";
    std::cerr << name << ": " << outcome.artifacts.size() << " artifacts in " << ctx.out.string() << "\n";
    return exit_code_for(outcome);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << " (partial artifacts flagged in the JSON summary)\n";
    return 3;
  }
}
