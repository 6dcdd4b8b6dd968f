#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualobs::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kValidation = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kMissingArtifact = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualobs::cli
