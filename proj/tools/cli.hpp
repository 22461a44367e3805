#pragma once

#include <iosfwd>

namespace quadlod::cli {

/// Exit codes: 0 success, 1 computation error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quadlod::cli
