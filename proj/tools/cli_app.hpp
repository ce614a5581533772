#pragma once

#include <iosfwd>

namespace ugr::cli {

// Dispatches argv to the subcommands (moments, coeffs, estimate, predict,
// pivots, study, analyze, tables). Returns the process exit code:
// 0 success, 1 user error, 2 numerical error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ugr::cli
