#ifndef ARGRECON_CLI_HPP
#define ARGRECON_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace argrecon {

// Runs the `argrecon` command line. `args` excludes the program name.
// Failures print {"error": {...}} on `err` and return nonzero.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace argrecon

#endif
