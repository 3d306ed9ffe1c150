#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace semrad::cli {

const std::vector<std::string>& command_names();

/// Runs one command; returns the process exit code (3 when a radiation run
/// diverged, which is recorded in the summary).
int run_command(const std::string& command, Config& config);

}  // namespace semrad::cli
