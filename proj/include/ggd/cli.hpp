#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ggd::cli {

enum ExitCode : int { ok = 0, bad_arguments = 2, io_failure = 3, pipeline_failure = 4 };

/// Runs the command line tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggd::cli
