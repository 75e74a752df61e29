#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alignmark::cli {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kBudgetExceeded = 3,
  kUniquenessAnomaly = 4,
};

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace alignmark::cli
