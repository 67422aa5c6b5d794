#include "orthomart/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "orthomart/errors.hpp"

namespace orthomart::cli {

namespace {

const std::vector<std::pair<Command, std::string>> kCommandNames{
    {Command::check, "check"},       {Command::decompose, "decompose"}, {Command::verify, "verify"},
    {Command::simulate, "simulate"}, {Command::wip, "wip"},             {Command::moments, "moments"},
    {Command::tails, "tails"},       {Command::orlicz, "orlicz"},       {Command::lemma7, "lemma7"},
    {Command::counterexample, "counterexample"},
};

const std::map<std::string, std::set<std::string>> kSchema{
    {"run", {"command", "seed", "workers", "out", "cutoff_ladder", "memory_budget"}},
    {"field", {"dimension", "generator", "coefficients", "coefficients_file", "rates", "exponents", "cutoff"}},
    {"simulation",
     {"law", "n", "replications", "p", "q", "x", "levels", "sizes", "draws", "eval_size", "trials",
      "variance_tolerance", "ks_alpha", "dump_grid"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  const auto s = trim(text);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s.empty()) throw ConfigError(key + ": expected a number, got ''");
  // "a/b" is accepted so that exponents such as 2/3 can be written exactly.
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double num = parse_real(key, s.substr(0, slash));
    const double den = parse_real(key, s.substr(slash + 1));
    if (den == 0.0) throw ConfigError(key + ": zero denominator");
    return num / den;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::int64_t> parse_integers(const std::string& key, const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_integer<std::int64_t>(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

nlohmann::json integers_json(const std::vector<std::int64_t>& v) { return nlohmann::json(v); }

std::size_t implied_dimension(GeneratorKind kind, const FieldSpec& f) {
  switch (kind) {
    case GeneratorKind::geometric: return f.rates.size();
    case GeneratorKind::power: return f.exponents.size();
    case GeneratorKind::dyadic_spikes: return 1;
    case GeneratorKind::harmonic_edge: return 2;
    case GeneratorKind::explicit_field: return 0;
  }
  return 0;
}

std::int64_t default_cutoff(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::geometric: return 48;
    case GeneratorKind::power: return 64;
    case GeneratorKind::dyadic_spikes: return 10;
    case GeneratorKind::harmonic_edge: return 64;
    case GeneratorKind::explicit_field: return 0;
  }
  return 0;
}

// Rough bytes per stored coefficient (ordered-map node plus index).
constexpr double kBytesPerEntry = 96.0;

}  // namespace

void check_materialization_budget(const ExperimentConfig& config, std::int64_t cutoff) {
  const auto kind = config.field.generator;
  const double d = static_cast<double>(config.field.dimension);
  double entries = 0.0;
  switch (kind) {
    case GeneratorKind::geometric:
    case GeneratorKind::power: entries = std::pow(static_cast<double>(cutoff) + 1.0, d); break;
    case GeneratorKind::dyadic_spikes:
    case GeneratorKind::harmonic_edge: entries = static_cast<double>(cutoff) + 1.0; break;
    case GeneratorKind::explicit_field: return;
  }
  if (entries * kBytesPerEntry > static_cast<double>(config.run.memory_budget)) {
    throw ResourceError("materializing the " + to_string(kind) + " field at cutoff " + std::to_string(cutoff) +
                        " needs about " + std::to_string(static_cast<std::uint64_t>(entries * kBytesPerEntry)) +
                        " bytes, budget is " + std::to_string(config.run.memory_budget));
  }
}

std::string to_string(Command command) {
  for (const auto& [c, name] : kCommandNames) {
    if (c == command) return name;
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommandNames) {
    if (n == name) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = [] {
    std::vector<Command> v;
    for (const auto& entry : kCommandNames) v.push_back(entry.first);
    return v;
  }();
  return commands;
}

std::vector<std::int64_t> parse_ladder(const std::string& text) {
  const auto s = trim(text);
  const auto dots = s.find("..");
  std::vector<std::int64_t> out;
  if (dots != std::string::npos) {
    const auto lo = trim(s.substr(0, dots));
    const auto hi = trim(s.substr(dots + 2));
    if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0) {
      throw ConfigError("cutoff_ladder: ranges are written 2^a..2^b, got '" + text + "'");
    }
    const int a = parse_integer<int>("cutoff_ladder", lo.substr(2));
    const int b = parse_integer<int>("cutoff_ladder", hi.substr(2));
    if (a < 0 || b < a || b > 62) throw ConfigError("cutoff_ladder: need 0 <= a <= b <= 62 in 2^a..2^b");
    for (int k = a; k <= b; ++k) out.push_back(std::int64_t{1} << k);
  } else {
    out = parse_integers("cutoff_ladder", s);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0) throw ConfigError("cutoff_ladder: cutoffs must be nonnegative");
    if (i > 0 && out[i] <= out[i - 1]) throw ConfigError("cutoff_ladder: cutoffs must increase strictly");
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in, Command command, const Overrides& overrides,
                              const std::string& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = kSchema.find(section);
    if (it == kSchema.end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(section + "/" + key, '/'))) {
      return trim(*v);
    }
    return std::nullopt;
  };

  ExperimentConfig c;
  auto& run = c.run;
  run.command = command;
  if (auto v = get("run", "command"); v && parse_command(*v) != command) {
    throw ConfigError("configuration is for command '" + *v + "' but '" + to_string(command) + "' was invoked");
  }
  if (auto v = get("run", "seed")) run.seed = parse_integer<std::uint64_t>("seed", *v);
  if (auto v = get("run", "workers")) run.workers = parse_integer<unsigned>("workers", *v);
  if (auto v = get("run", "out")) run.out = *v;
  if (auto v = get("run", "cutoff_ladder")) run.cutoff_ladder = parse_ladder(*v);
  if (auto v = get("run", "memory_budget")) run.memory_budget = parse_integer<std::size_t>("memory_budget", *v);
  if (overrides.seed) run.seed = *overrides.seed;
  if (overrides.workers) run.workers = *overrides.workers;
  if (overrides.out) run.out = *overrides.out;
  if (overrides.cutoff_ladder) run.cutoff_ladder = parse_ladder(*overrides.cutoff_ladder);
  if (run.workers == 0) throw ConfigError("workers must be at least 1");
  if (run.memory_budget == 0) throw ConfigError("memory_budget must be positive");

  auto& field = c.field;
  try {
    if (auto v = get("field", "generator")) field.generator = parse_generator_kind(*v);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("generator: ") + e.what());
  }
  if (auto v = get("field", "rates")) field.rates = parse_reals("rates", *v);
  if (auto v = get("field", "exponents")) field.exponents = parse_reals("exponents", *v);
  if (auto v = get("field", "coefficients")) field.coefficients = *v;
  if (auto v = get("field", "coefficients_file")) {
    std::filesystem::path p(*v);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    field.coefficients_file = p.lexically_normal().string();
  }
  if (auto v = get("field", "cutoff")) {
    field.cutoff = parse_integer<std::int64_t>("cutoff", *v);
    if (*field.cutoff < 0) throw ConfigError("cutoff must be nonnegative");
  }
  const auto kind = field.generator;
  if (kind == GeneratorKind::geometric && field.rates.empty()) throw ConfigError("geometric generator needs rates");
  if (kind == GeneratorKind::power && field.exponents.empty()) throw ConfigError("power generator needs exponents");
  if (kind != GeneratorKind::geometric && !field.rates.empty()) throw ConfigError("rates only apply to geometric");
  if (kind != GeneratorKind::power && !field.exponents.empty()) throw ConfigError("exponents only apply to power");
  if (kind != GeneratorKind::explicit_field && (!field.coefficients.empty() || !field.coefficients_file.empty())) {
    throw ConfigError("coefficients only apply to the explicit generator");
  }
  if (!field.coefficients.empty() && !field.coefficients_file.empty()) {
    throw ConfigError("give coefficients or coefficients_file, not both");
  }
  const std::size_t implied = implied_dimension(kind, field);
  if (auto v = get("field", "dimension")) {
    field.dimension = parse_integer<std::size_t>("dimension", *v);
    if (field.dimension == 0) throw ConfigError("dimension must be at least 1");
    if (implied != 0 && implied != field.dimension) {
      throw ConfigError("dimension " + std::to_string(field.dimension) + " contradicts the " + to_string(kind) +
                        " generator (dimension " + std::to_string(implied) + ")");
    }
  } else if (implied != 0) {
    field.dimension = implied;
  } else if (!field.coefficients_file.empty()) {
    std::ifstream f(field.coefficients_file);
    if (!f) throw ConfigError("cannot open coefficients_file '" + field.coefficients_file + "'");
    try {
      field.dimension = read_records(f).dimension();
    } catch (const std::exception& e) {
      throw ConfigError("coefficients_file: " + std::string(e.what()));
    }
  } else if (!field.coefficients.empty()) {
    // channel, d coordinates, value
    const auto first = field.coefficients.substr(0, field.coefficients.find(';'));
    const auto n = split_list(first).size();
    if (n < 3) throw ConfigError("coefficients: records are 'channel,i_1,...,i_d,value'");
    field.dimension = n - 2;
  }
  if (kind != GeneratorKind::explicit_field && !field.cutoff) field.cutoff = default_cutoff(kind);

  auto& sim = c.simulation;
  try {
    if (auto v = get("simulation", "law")) sim.law = parse_innovation_law(*v);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
  if (auto v = get("simulation", "n")) {
    sim.n = parse_integers("n", *v);
    if (sim.n.size() == 1) sim.n.assign(field.dimension, sim.n.front());
    if (sim.n.size() != field.dimension) throw ConfigError("n must have one entry per axis");
  }
  for (auto v : sim.n) {
    if (v < 1) throw ConfigError("n: block sizes must be >= 1");
  }
  if (auto v = get("simulation", "replications")) sim.replications = parse_integer<std::size_t>("replications", *v);
  if (sim.replications < 2) throw ConfigError("replications must be at least 2");
  if (auto v = get("simulation", "p")) sim.p = parse_reals("p", *v);
  if (auto v = get("simulation", "q")) sim.q = parse_real("q", *v);
  if (auto v = get("simulation", "x")) sim.x = parse_reals("x", *v);
  if (auto v = get("simulation", "levels")) sim.levels = parse_reals("levels", *v);
  if (auto v = get("simulation", "sizes")) sim.sizes = parse_integers("sizes", *v);
  if (auto v = get("simulation", "draws")) sim.draws = parse_integer<std::size_t>("draws", *v);
  if (auto v = get("simulation", "eval_size")) sim.eval_size = parse_integer<std::int64_t>("eval_size", *v);
  if (auto v = get("simulation", "trials")) sim.trials = parse_integer<std::size_t>("trials", *v);
  if (auto v = get("simulation", "variance_tolerance")) sim.variance_tolerance = parse_real("variance_tolerance", *v);
  if (auto v = get("simulation", "ks_alpha")) sim.ks_alpha = parse_real("ks_alpha", *v);
  if (auto v = get("simulation", "dump_grid")) sim.dump_grid = parse_bool("dump_grid", *v);
  for (double p : sim.p) {
    if (!(p >= 2.0)) throw ConfigError("p: moment orders must be >= 2");
  }
  for (double x : sim.x) {
    if (!(x > 0.0)) throw ConfigError("x: levels must be positive");
  }
  for (double x : sim.levels) {
    if (!(x > 0.0)) throw ConfigError("levels must be positive");
  }
  for (auto s : sim.sizes) {
    if (s < 1) throw ConfigError("sizes must be >= 1");
  }
  if (sim.sizes.size() == 1) throw ConfigError("sizes needs at least two entries for a decay fit");
  if (!(sim.q > 0.0)) throw ConfigError("q must be positive");
  if (sim.eval_size < 1) throw ConfigError("eval_size must be >= 1");
  if (sim.draws < 2) throw ConfigError("draws must be at least 2");
  if (sim.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(sim.variance_tolerance > 0.0)) throw ConfigError("variance_tolerance must be positive");
  if (!(sim.ks_alpha > 0.0 && sim.ks_alpha < 1.0)) throw ConfigError("ks_alpha must lie in (0, 1)");
  return c;
}

ExperimentConfig load_config(const std::string& path, Command command, const Overrides& overrides) {
  if (path.empty()) {
    std::istringstream empty;
    return parse_config(empty, command, overrides);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, command, overrides, dir.empty() ? "." : dir.string());
}

nlohmann::json resolved(const ExperimentConfig& c) {
  nlohmann::json j;
  j["run"] = {{"command", to_string(c.run.command)},
              {"seed", c.run.seed},
              {"cutoff_ladder", integers_json(c.run.cutoff_ladder)},
              {"memory_budget", c.run.memory_budget}};
  nlohmann::json field = {{"dimension", c.field.dimension}, {"generator", to_string(c.field.generator)}};
  if (c.field.generator == GeneratorKind::explicit_field) {
    field["coefficients"] = c.field.coefficients;
    field["coefficients_file"] = c.field.coefficients_file;
  }
  if (!c.field.rates.empty()) field["rates"] = c.field.rates;
  if (!c.field.exponents.empty()) field["exponents"] = c.field.exponents;
  field["cutoff"] = c.field.cutoff ? nlohmann::json(*c.field.cutoff) : nlohmann::json(nullptr);
  j["field"] = field;
  const auto& s = c.simulation;
  std::vector<std::int64_t> n = s.n;
  if (n.empty()) n.assign(c.field.dimension, 64);
  j["simulation"] = {{"law", to_string(s.law)},
                     {"n", n},
                     {"replications", s.replications},
                     {"p", s.p},
                     {"q", s.q},
                     {"x", s.x},
                     {"levels", s.levels},
                     {"sizes", s.sizes},
                     {"draws", s.draws},
                     {"eval_size", s.eval_size},
                     {"trials", s.trials},
                     {"variance_tolerance", s.variance_tolerance},
                     {"ks_alpha", s.ks_alpha},
                     {"dump_grid", s.dump_grid}};
  return j;
}

GeneratorRule make_rule(const ExperimentConfig& config) {
  const auto& f = config.field;
  switch (f.generator) {
    case GeneratorKind::geometric: return GeneratorRule::geometric(f.rates);
    case GeneratorKind::power: return GeneratorRule::power(f.exponents);
    case GeneratorKind::dyadic_spikes: return GeneratorRule::dyadic_spikes();
    case GeneratorKind::harmonic_edge: return GeneratorRule::harmonic_edge();
    case GeneratorKind::explicit_field: break;
  }
  CoefficientField field(f.dimension);
  if (!f.coefficients_file.empty()) {
    std::ifstream in(f.coefficients_file);
    if (!in) throw ConfigError("cannot open coefficients_file '" + f.coefficients_file + "'");
    try {
      field = read_records(in);
    } catch (const std::exception& e) {
      throw ConfigError("coefficients_file: " + std::string(e.what()));
    }
    if (field.dimension() != f.dimension) throw ConfigError("coefficients_file dimension differs from [field] dimension");
  } else if (!f.coefficients.empty()) {
    try {
      field = parse_records(f.coefficients, f.dimension);
    } catch (const std::exception& e) {
      throw ConfigError("coefficients: " + std::string(e.what()));
    }
  } else {
    field = CoefficientField::delta(MultiIndex::zero(f.dimension));
  }
  return GeneratorRule::explicit_field(std::move(field));
}

CoefficientField make_field(const ExperimentConfig& config) {
  const auto rule = make_rule(config);
  if (config.field.generator == GeneratorKind::explicit_field) {
    if (!config.field.cutoff) return rule.materialize(std::numeric_limits<std::int64_t>::max());
    return rule.materialize(*config.field.cutoff);
  }
  check_materialization_budget(config, *config.field.cutoff);
  return rule.materialize(*config.field.cutoff);
}

MultiIndex block_size(const ExperimentConfig& config, std::size_t dimension) {
  if (config.simulation.n.empty()) return MultiIndex::filled(dimension, 64);
  if (config.simulation.n.size() != dimension) throw ConfigError("n must have one entry per axis");
  return MultiIndex(std::span<const std::int64_t>(config.simulation.n));
}

}  // namespace orthomart::cli
