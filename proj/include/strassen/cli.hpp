#pragma once

#include <ostream>

namespace strassen {

/// Exit codes: 0 success, 1 unexpected failure, 2 validation error (bad
/// flags, malformed instance), 3 size-guard refusal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace strassen
