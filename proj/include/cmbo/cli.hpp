#pragma once

namespace cmbo::cli {

/// Exit codes of the command-line front end.
inline constexpr int kOk = 0;
inline constexpr int kUsageOrDomain = 1;
inline constexpr int kBlowUp = 2;

/// Parses argv and runs one subcommand. Never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace cmbo::cli
