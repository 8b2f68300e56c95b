#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qiopa/cli/config.hpp"

namespace qiopa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitInsufficientData = 4,
};

struct CommandContext {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

// Each command writes its CSV files plus <command>.manifest into out_dir and
// returns an exit code. Numerical and data failures are thrown.
int cmd_fringe(const RunConfig& cfg, const CommandContext& ctx);
int cmd_gain_sweep(const RunConfig& cfg, const CommandContext& ctx);
int cmd_distribution(const RunConfig& cfg, const CommandContext& ctx);
int cmd_filter_sweep(const RunConfig& cfg, const CommandContext& ctx);
int cmd_oracle_check(const RunConfig& cfg, const CommandContext& ctx);

// Full command line: parses arguments, runs one subcommand and maps failures
// to exit codes.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace qiopa::cli
