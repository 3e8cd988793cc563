#pragma once

// The `drain` command line: build-dataset, train, retrieve, evaluate, grid-diff.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical abort.

#include <iosfwd>
#include <string>
#include <vector>

#include "drain/cli/config.hpp"

namespace drain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Each command writes into a sibling staging directory and renames it over
// the output directory once everything is written.
void cmd_build_dataset(const RunConfig& cfg, std::ostream& log);
void cmd_train(const RunConfig& cfg, std::ostream& log);
void cmd_retrieve(const RunConfig& cfg, std::ostream& log);
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);
void cmd_grid_diff(const RunConfig& cfg, std::ostream& log);

/// Parses argv-style arguments (without the program name), runs the command
/// and maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drain::cli
