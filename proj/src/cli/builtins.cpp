#include "pcs/cli/builtins.hpp"

#include "pcs/cli/io.hpp"

namespace pcs::cli {

std::vector<BuiltinInfo> builtin_list() {
  return {
      {"example61", "scalar, a(t) = -1 on [0,1), -2 on [1,2), T = 2, U = [-1,1]"},
      {"example62", "x' = x + u, y' = -y + u, U = [-1,1] (saddle)"},
      {"example63", "x' = x + u, y' = 2y + u, U = [-1,1] (unstable knot)"},
  };
}

PeriodicSystem builtin_system(const std::string& name) {
  const ControlRange u = ControlRange::symmetric_box(1);
  if (name == "example61") {
    std::vector<CoefficientSegment> segs = {
        {0.0, 1.0, MatrixXd::Constant(1, 1, -1.0), MatrixXd::Ones(1, 1)},
        {1.0, 2.0, MatrixXd::Constant(1, 1, -2.0), MatrixXd::Ones(1, 1)},
    };
    return PeriodicSystem(2.0, std::move(segs), u);
  }
  if (name == "example62" || name == "example63") {
    MatrixXd a = MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = name == "example62" ? -1.0 : 2.0;
    return PeriodicSystem::constant(a, MatrixXd::Ones(2, 1), 1.0, u);
  }
  throw ConfigError("unknown builtin \"" + name + "\" (expected example61, example62 or example63)");
}

}  // namespace pcs::cli
