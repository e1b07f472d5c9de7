#pragma once

#include <string>
#include <vector>

#include "pcs/periodic_system.hpp"

namespace pcs::cli {

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> builtin_list();

/// example61: ẋ = a(t)x + u with a = -1 on [0,1), -2 on [1,2), T = 2.
/// example62: ẋ = x + u, ẏ = -y + u.   example63: ẋ = x + u, ẏ = 2y + u.
/// All use U = [-1, 1]; the autonomous ones are given period 1.
PeriodicSystem builtin_system(const std::string& name);

}  // namespace pcs::cli
