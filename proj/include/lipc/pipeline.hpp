#pragma once

#include "lipc/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace lipc {

enum ExitCode { exit_ok = 0, exit_solver_failure = 1, exit_stationarity_failure = 2, exit_inconsistent = 3 };

struct RunOptions {
  std::string command;  // solve | optimize | check | approx-study | mollifier-study
  std::filesystem::path out_dir;
  bool verbose = false;
};

// Runs one command and writes its artifacts into out_dir. Errors are reported on `log` and
// mapped to exit code 1; check maps its report to 0, 2 or 3.
int run_pipeline(const ParsedConfig& config, const RunOptions& options, std::ostream& log);

// Loads the config (optionally overriding the seed) and runs. Parse errors give exit code 1.
int run_from_file(const std::filesystem::path& config_path, const RunOptions& options,
                  std::optional<std::uint64_t> seed_override, std::ostream& log);

}  // namespace lipc
