#pragma once

#include <iosfwd>

namespace diffscope::cli {

/// Exit codes: 0 ok, 1 input or IO failure, 2 bad flags, 3 oracle divergence.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diffscope::cli
