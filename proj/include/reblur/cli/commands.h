#ifndef REBLUR_CLI_COMMANDS_H_
#define REBLUR_CLI_COMMANDS_H_

namespace reblur::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// Entry point of the `reblur` tool: synth | train | eval | tta | sweep | report.
// Returns the process exit code; never throws.
int Main(int argc, const char* const* argv);

}  // namespace reblur::cli

#endif  // REBLUR_CLI_COMMANDS_H_
