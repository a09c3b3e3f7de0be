#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subgcn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Entry point of the `subgcn` tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace subgcn::cli
