#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ffrate::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, not_converged = 3 };

/// Runs one command. args excludes the program name. Data goes to `out`
/// (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ffrate::cli
