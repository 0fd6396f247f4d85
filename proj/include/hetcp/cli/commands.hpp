#pragma once

#include <iosfwd>

namespace hetcp::cli {

/// Entry point of the `hetcp` tool. Exit codes: 0 success, 2 config error,
/// 3 data error, 1 anything unexpected.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetcp::cli
