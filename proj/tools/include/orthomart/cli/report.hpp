#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "orthomart/cli/config.hpp"

namespace orthomart::cli {

/// A delimited table written as <name>.csv.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct CommandResult {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<Table> tables;
  /// Extra text files (name, content), written verbatim.
  std::vector<std::pair<std::string, std::string>> files;
  /// Proven invariants or bounds that failed; any entry makes the exit status 3.
  std::vector<std::string> violations;
  std::vector<std::string> notices;
};

/// Number cell: shortest round-trip form, "inf"/"-inf"/"nan" for non-finite values.
std::string cell(double value);
/// JSON number, or the same strings as `cell` for non-finite values.
nlohmann::json number(double value);

/// Writes every table and file plus summary.json into config.run.out. Tables
/// carry '#' header lines with the seeding scheme and the resolved config.
/// The summary's "execution" member (timestamp, workers, output directory) is
/// written on a line of its own; it is the only content that may differ
/// between runs with the same configuration and seed.
std::vector<std::string> write_outputs(const ExperimentConfig& config, const CommandResult& result,
                                       const std::string& timestamp);

std::string utc_timestamp();

}  // namespace orthomart::cli
