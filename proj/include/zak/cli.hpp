#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zak {

// Exit codes: 0 success, 2 configuration or model error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zak
