#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relflow {

// Runs the command line interface; args excludes the program name. Returns
// the process exit code: 0 ok, 1 validation error, 2 budget exceeded,
// 3 usage error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace relflow
