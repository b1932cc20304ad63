#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridsentinel {

/// Runs one command line. Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridsentinel
