#ifndef SEAFLOOR_TOOLS_COMMANDS_HPP
#define SEAFLOOR_TOOLS_COMMANDS_HPP

#include <string>

namespace seafloor::cli {

enum ExitCode : int { Ok = 0, Usage = 2, IoFailure = 3, DomainFailure = 4 };

/// Parses argv, runs one subcommand and reports on stdout/stderr.
int run(int argc, char** argv);

}  // namespace seafloor::cli

#endif  // SEAFLOOR_TOOLS_COMMANDS_HPP
