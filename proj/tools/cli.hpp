#pragma once

// Batch front end: korn, rigidity, shell and selftest subcommands.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kornlab::cli {

/// Exit code of a selftest run with at least one failing property.
inline constexpr int kPropertyFailure = 1;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelftestOptions {
  std::uint64_t seed = 1;
  int samples = 10000;
  bool break_det_constant = false;
};

/// Prints one PASS/FAIL line per property; returns 0 or kPropertyFailure.
int selftest(const SelftestOptions& options, std::ostream& out);

}  // namespace kornlab::cli
