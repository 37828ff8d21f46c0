#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frob {

// Parsed command-line configuration; defaults match the documented ones.
struct RunConfig {
    std::string subcommand;
    std::string poly_text;
    int n = 0;
    std::string deform_spec = "good-max"; // or ';'-separated Laurent polynomials
    int order = 6;
    bool json = false;
    uint64_t seed = 1;
    int trials = 32;
    int64_t budget = 2000000;
};

// Runs one CLI invocation; argv excludes the program name. Output goes to
// `out`, diagnostics to `err`. Returns the process exit code:
//   0 ok, 2 input error, 3 precondition failure, 4 verification failure,
//   5 budget exceeded, 6 internal error.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace frob
