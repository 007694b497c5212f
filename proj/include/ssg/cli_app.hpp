#pragma once

#include <string>
#include <vector>

namespace ssg {

// Runs the ssg command line (slice | converge | verify).  Returns the process
// exit code: 0 success, 1 failed verdict, 2 config/usage error, 3 numerical
// error (typed error name printed to stderr).
int run_cli(const std::vector<std::string>& args);

}  // namespace ssg
