#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace d2dsim {

// Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid invocation or
// configuration. Errors are written to err as one JSON record.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace d2dsim
