#pragma once

#include <string>
#include <vector>

namespace swnn::cli {

/// Runs one CLI invocation. Returns 0 on success, 1 on I/O or data errors,
/// 2 on usage errors.
int run(int argc, const char* const* argv);

/// Same, for in-process callers; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace swnn::cli
