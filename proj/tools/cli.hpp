/**
 * @file cli.hpp
 * @brief Entry point of the sreval command line, callable in-process.
 *
 * Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
 */

#ifndef SREVAL_TOOLS_CLI_HPP
#define SREVAL_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace sreval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sreval::cli

#endif  // SREVAL_TOOLS_CLI_HPP
