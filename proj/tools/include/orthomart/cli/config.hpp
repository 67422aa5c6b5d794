#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthomart/coefficient_field.hpp"
#include "orthomart/fieldsim.hpp"
#include "orthomart/generator.hpp"

namespace orthomart::cli {

/// Schema violation in a configuration file or on the command line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { check, decompose, verify, simulate, wip, moments, tails, orlicz, lemma7, counterexample };

std::string to_string(Command command);
Command parse_command(const std::string& name);
const std::vector<Command>& all_commands();

struct RunSpec {
  Command command = Command::check;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out = "orthomart-out";
  /// Empty means the command's default ladder.
  std::vector<std::int64_t> cutoff_ladder;
  std::size_t memory_budget = kDefaultMemoryBudget;
};

struct FieldSpec {
  std::size_t dimension = 1;
  GeneratorKind generator = GeneratorKind::explicit_field;
  /// Records "channel,i_1,...,i_d,value" separated by ';'. Empty with no file means e.
  std::string coefficients;
  std::string coefficients_file;
  std::vector<double> rates;
  std::vector<double> exponents;
  std::optional<std::int64_t> cutoff;
};

struct SimulationSpec {
  InnovationLaw law = InnovationLaw::gaussian;
  /// Empty means 64 on every axis.
  std::vector<std::int64_t> n;
  std::size_t replications = 2000;
  std::vector<double> p{2.0};
  double q = 2.0 / 3.0;
  std::vector<double> x{1.0};
  /// Orlicz levels; empty means {1, 2, 4, 8} * sqrt(|n|).
  std::vector<double> levels;
  std::vector<std::int64_t> sizes;
  std::size_t draws = 20000;
  std::int64_t eval_size = 16;
  std::size_t trials = 500;
  double variance_tolerance = 0.1;
  double ks_alpha = 0.01;
  bool dump_grid = false;
};

struct ExperimentConfig {
  RunSpec run;
  FieldSpec field;
  SimulationSpec simulation;
};

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> cutoff_ladder;
};

/// "16,32,64" or "2^4..2^10" (powers of two between the exponents).
std::vector<std::int64_t> parse_ladder(const std::string& text);

/// Reads an INI document with sections [run], [field] and [simulation].
/// Unknown sections or keys and malformed values raise ConfigError.
/// `base_dir` resolves a relative coefficients_file.
ExperimentConfig parse_config(std::istream& in, Command command, const Overrides& overrides,
                              const std::string& base_dir = ".");
/// An empty path means defaults only.
ExperimentConfig load_config(const std::string& path, Command command, const Overrides& overrides);

/// The fully resolved configuration with defaults expanded. Worker count and
/// output directory are left out: they do not influence results.
nlohmann::json resolved(const ExperimentConfig& config);

GeneratorRule make_rule(const ExperimentConfig& config);
/// The finite field the simulation commands operate on. Throws ResourceError
/// when the materialized support would exceed the memory budget.
CoefficientField make_field(const ExperimentConfig& config);
/// Throws ResourceError when a generator field at `cutoff` would exceed the memory budget.
void check_materialization_budget(const ExperimentConfig& config, std::int64_t cutoff);
/// Block size n with defaults expanded.
MultiIndex block_size(const ExperimentConfig& config, std::size_t dimension);

}  // namespace orthomart::cli
