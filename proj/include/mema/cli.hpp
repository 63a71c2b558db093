#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mema::cli {

/// Runs the command line; args excludes the program name. Returns the exit
/// code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mema::cli
