#pragma once

namespace nlds::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kSolver = 2, kConfig = 3 };

/// Parses argv, runs one subcommand and writes its report. Never throws.
int run(int argc, char** argv);

}  // namespace nlds::cli
