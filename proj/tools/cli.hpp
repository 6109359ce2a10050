#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnctl::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kParseError = 2,
    kBadArguments = 3,
};

/// Runs one command line (args[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnctl::cli
