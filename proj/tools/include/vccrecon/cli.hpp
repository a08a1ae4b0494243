#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vcc::cli {

/// Runs one subcommand. args excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data or file errors.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

int run(int argc, char **argv);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(std::string const &path);

} // namespace vcc::cli
