#include "orthomart/cli/app.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "orthomart/cli/commands.hpp"
#include "orthomart/cli/config.hpp"
#include "orthomart/cli/report.hpp"
#include "orthomart/errors.hpp"

#ifndef ORTHOMART_VERSION
#define ORTHOMART_VERSION "0.0.0"
#endif

namespace orthomart::cli {

namespace {

const char* describe(Command c) {
  switch (c) {
    case Command::check: return "evaluate convergence conditions of a generator on a cutoff ladder";
    case Command::decompose: return "decompose a finite field and check the round trip";
    case Command::verify: return "check the decomposition pointwise on a sampled lattice";
    case Command::simulate: return "simulate partial sums S_n";
    case Command::wip: return "variance and normality of S_n / |n|^(1/2)";
    case Command::moments: return "orthomartingale moment bound";
    case Command::tails: return "partial-sum norm and tail bounds";
    case Command::orlicz: return "Orlicz-norm tail form and tail decay";
    case Command::lemma7: return "tail-square and Gordin chain inequalities on random inputs";
    case Command::counterexample: return "dyadic-spikes and harmonic-edge regression fixtures";
  }
  return "";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"orthomart: martingale-coboundary decompositions of stationary linear random fields", "orthomart"};
  app.set_version_flag("--version", ORTHOMART_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir;
  std::string ladder;
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides [run] seed)");
  auto* workers_opt =
      app.add_option("--workers", workers, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides [run] out)");
  auto* ladder_opt = app.add_option("--cutoff-ladder", ladder, "cutoffs, e.g. 16,32,64 or 2^10..2^20");
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);

  std::optional<Command> chosen;
  for (Command c : all_commands()) {
    app.add_subcommand(to_string(c), describe(c))->callback([&chosen, c] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kSuccess;
    }
    err << "orthomart: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    Overrides overrides;
    if (seed_opt->count()) overrides.seed = seed;
    if (workers_opt->count()) overrides.workers = workers;
    if (out_opt->count()) overrides.out = out_dir;
    if (ladder_opt->count()) overrides.cutoff_ladder = ladder;
    const auto config = load_config(config_path, *chosen, overrides);
    const auto result = execute(config);
    const auto files = write_outputs(config, result, utc_timestamp());
    out << to_string(config.run.command) << ": " << (result.violations.empty() ? "ok" : "violation") << '\n';
    for (const auto& n : result.notices) out << "  notice: " << n << '\n';
    out << "  outputs in " << config.run.out << ":";
    for (const auto& f : files) out << ' ' << f;
    out << '\n';
    for (const auto& v : result.violations) err << "violation: " << v << '\n';
    return result.violations.empty() ? kSuccess : kViolation;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const ResourceError& e) {
    err << "resource budget exceeded: " << e.what() << '\n';
    return kResourceBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace orthomart::cli
