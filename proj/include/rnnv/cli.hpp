#pragma once
// command-line front end: kappa-table, derive, simulate and sweep subcommands
// around the sequence/engine/experiments layers, with JSON run configs.

#include <iosfwd>
#include <string>
#include <vector>

namespace rnnv {

inline constexpr const char* kToolName = "rnnv-forge";
inline constexpr const char* kToolVersion = "0.1.0";

// runs one invocation; args exclude the program name.  returns the process
// exit code: 0 success, 2 usage error, 3 infeasible physics, 4 numerical or
// runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rnnv
