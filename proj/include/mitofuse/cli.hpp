#ifndef MITOFUSE_CLI_HPP
#define MITOFUSE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mitofuse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: tile, fuse, eval, augment, simulate, split.
// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace mitofuse

#endif  // MITOFUSE_CLI_HPP
