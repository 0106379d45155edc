#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace regcheck::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolations = 2;

/// Entry point of the regcheck tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regcheck::cli
