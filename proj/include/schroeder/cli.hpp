#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "schroeder/rational_map.hpp"

namespace schroeder {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

/// Runs `schroeder-lab` with args[0] as the program name. Reports go to the
/// --out file when given, otherwise to `out`; messages go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "re,im" or "inf".
SpherePoint parse_sphere_point(const std::string& text);

} // namespace schroeder
