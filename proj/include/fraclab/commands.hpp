#pragma once

#include <filesystem>
#include <string>

#include "fraclab/artifacts.hpp"
#include "fraclab/config.hpp"

namespace fraclab {

// Each command writes its CSV artifacts and summary.json into `out` and
// returns the summary. Solver failures propagate as exceptions.
RunSummary cmd_solve(const RunConfig& config, const std::filesystem::path& out);
RunSummary cmd_bracket(const RunConfig& config, const std::filesystem::path& out);
RunSummary cmd_capacity(const RunConfig& config, const std::filesystem::path& out);
RunSummary cmd_stability(const RunConfig& config, const std::filesystem::path& out);
RunSummary cmd_mc_verify(const RunConfig& config, const std::filesystem::path& out);

// Dispatch by subcommand name (solve | bracket | capacity | stability | mc-verify).
RunSummary run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out);

enum ExitCode : int {
    kExitSuccess = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNonConvergence = 3,
    kExitAcceptance = 4,
};

// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace fraclab
