#pragma once

#include <iosfwd>

namespace webqa {

/// Exit codes shared by every subcommand.
enum exit_code : int {
  exit_ok = 0, // includes an abstained question
  exit_usage = 1,
  exit_data = 2,
  exit_backend = 3,
};

/// Entry point of the `webqa` tool; writes normal output to `out` and
/// diagnostics to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace webqa
