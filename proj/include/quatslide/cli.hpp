#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "quatslide/scenario.hpp"

namespace quatslide {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitSingular = 2,
  kExitDivergence = 3,
};

/// Runs a resolved scenario and writes trace.csv, metrics.json and
/// scenario.resolved.json into `dir` (created if needed). The CSV is
/// streamed, so an aborted run leaves the rows logged so far plus the abort
/// record. Returns the exit code for the run.
int run_and_write(const Scenario& scenario, const std::filesystem::path& dir, std::ostream& log);

/// Subcommands: run <scenario.json> [--out DIR] | demo <name> [--out DIR] [--print]
///              | list-demos | validate <scenario.json> [--samples N]
int cli_main(int argc, char** argv);
/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace quatslide
