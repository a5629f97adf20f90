#pragma once

#include <iosfwd>

namespace logsample {

/// Entry point of the `logsample` tool. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace logsample
