#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coexist::cli {

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,  // plan rules broken
  kUsage = 2,       // bad flags, unreadable or malformed input
};

/// Runs one `coexist-sim` invocation. `args` excludes the program name.
/// Machine output goes to --out DIR when given, otherwise to `out`; the
/// human summary goes to `out` with --out and to `err` without it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace coexist::cli
