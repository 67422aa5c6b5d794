#pragma once

#include "orthomart/cli/config.hpp"
#include "orthomart/cli/report.hpp"

namespace orthomart::cli {

/// Runs one subcommand. Library errors propagate; violated invariants and
/// bounds are collected in the result instead of thrown.
CommandResult execute(const ExperimentConfig& config);

}  // namespace orthomart::cli
