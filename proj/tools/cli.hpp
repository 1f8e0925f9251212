#ifndef CIFTI_TOOLS_CLI_HPP
#define CIFTI_TOOLS_CLI_HPP

#include <string>
#include <vector>

namespace cifti {

//! Runs the command line and returns the process exit code.
int run_cli(int argc, char const *const *argv);
int run_cli(std::vector<std::string> const &args);

} // namespace cifti

#endif
