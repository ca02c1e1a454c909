//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_CLI_HPP_
#define OPFORGE_CLI_HPP_

#include <ostream>
#include <span>
#include <string>

namespace opforge::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

/// Runs one subcommand: prepare, train, generate, evolve, score or report.
/// `args` excludes the program name. CSV written to stdout goes to `out`;
/// logs, usage text and error messages go to `err`.
int cli_main(std::span<const std::string> args, std::ostream &out, std::ostream &err);

}  // namespace opforge::cli

#endif  // OPFORGE_CLI_HPP_
