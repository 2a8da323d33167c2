#pragma once

#include <string>
#include <vector>

namespace kairos::cli {

/// Runs one CLI invocation. Returns 0 on success, 1 on validation errors,
/// 2 on usage errors.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);

}  // namespace kairos::cli
