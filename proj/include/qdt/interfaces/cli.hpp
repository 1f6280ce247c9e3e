#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdt::interfaces {

/// Exit codes of the `qdt` command.
inline constexpr int kExitOk = 0;
/// Run aborted, tree invalid or any other failure.
inline constexpr int kExitFailure = 1;
/// Missing input file or bad command line.
inline constexpr int kExitUsage = 2;

/// Dispatches `qdt` subcommands: validate, run, assess, build-db, serve.
/// `args` excludes the program name. Diagnostics go to `err` as
/// "error: CODE: message"; nothing escapes as an exception.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace qdt::interfaces
