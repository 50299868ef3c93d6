#pragma once

#include <string>
#include <vector>

namespace sogppa {

// Full command-line surface; exposed as a library call so tests can drive the
// tool in-process. Returns the process exit code (0 ok, 1 runtime failure,
// 2 usage error).
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace sogppa
