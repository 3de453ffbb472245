#pragma once

#include <string>
#include <vector>

namespace chefs::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFatal = 1;           ///< I/O, bad configuration, unknown report
inline constexpr int kSchemaConflict = 2;
inline constexpr int kValidationFailed = 3;

/// Entry point of the chefs tool. args excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace chefs::cli
