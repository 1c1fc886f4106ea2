#ifndef RINGKIT_TOOLS_CLI_HPP
#define RINGKIT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace ringkit::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitPipeline = 3;

// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace ringkit::cli

#endif // RINGKIT_TOOLS_CLI_HPP
