#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "pcs/cli/builtins.hpp"
#include "pcs/control_set.hpp"
#include "pcs/errors.hpp"
#include "pcs/linalg.hpp"

using namespace pcs;

namespace {

double box_support(const VectorXd& p, double rx, double ry) { return rx * std::abs(p(0)) + ry * std::abs(p(1)); }

}  // namespace

TEST_CASE("bounded components of the examples") {
  const auto sys61 = cli::builtin_system("example61");
  const auto k61 = bounded_component_minus(sys61, 0.5, 64, {}, 1e-10);
  REQUIRE(k61.size() == 2);
  CHECK(k61.support[0] == doctest::Approx(oracle::radius61(0.5)).epsilon(1e-9));
  CHECK(bounded_component_plus(sys61, 0.5, 64, {}).size() == 0);

  const auto sys62 = cli::builtin_system("example62");
  const auto km = bounded_component_minus(sys62, 0.0, 64, {});
  const auto kp = bounded_component_plus(sys62, 0.0, 64, {});
  for (double h : km.support) CHECK(h == doctest::Approx(1.0).epsilon(1e-7));
  for (double h : kp.support) CHECK(h == doctest::Approx(1.0).epsilon(1e-7));

  const auto sys63 = cli::builtin_system("example63");
  CHECK(bounded_component_minus(sys63, 0.0, 64, {}).size() == 0);
  const auto kp63 = bounded_component_plus(sys63, 0.0, 64, {});
  CHECK(kp63.size() == 64);
}

TEST_CASE("components refuse to stop before convergence") {
  // Slow contraction: λ = -0.05 needs ~ 400 periods for 1e-8 increments.
  const auto slow = PeriodicSystem::constant(MatrixXd::Constant(1, 1, -0.05), MatrixXd::Ones(1, 1), 1.0,
                                             ControlRange::symmetric_box(1));
  CHECK_THROWS_AS(bounded_component_minus(slow, 0.0, 16, {}), NumericalError);
  CHECK_NOTHROW(bounded_component_minus(slow, 0.0, 800, {}));
}

TEST_CASE("example 6.2 sandwich is the unit box") {
  const auto sys = cli::builtin_system("example62");
  const auto dirs = sample_directions(2, 64);
  const auto s = control_set_sandwich(sys, {0.0, 0.5}, dirs);
  CHECK_FALSE(s.unbounded);
  for (const auto& f : s.fibers) {
    CHECK(f.max_gap() < 1e-3);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double box = box_support(dirs[i], 1.0, 1.0);
      CHECK(std::abs(f.inner[i] - box) < 1e-6);
      CHECK(f.inner[i] <= f.outer[i] + 1e-9);
      CHECK(f.theorem_inner[i] <= f.inner[i] + 1e-7);
      CHECK(f.outer[i] <= f.theorem_outer[i] + 1e-9);
      CHECK(f.inner[i] > 0.0);
      CHECK(std::abs(dirs[i].dot(f.inner_points[i]) - f.inner[i]) < 1e-9);
    }
    // Y preserves the splitting.
    CHECK(max_principal_angle(orthonormalize(f.y * f.stable_basis), f.stable_basis) < 1e-8);
    CHECK(max_principal_angle(orthonormalize(f.y * f.unstable_basis), f.unstable_basis) < 1e-8);
  }
}

TEST_CASE("example 6.3 sandwich axis radii") {
  const auto sys = cli::builtin_system("example63");
  std::vector<VectorXd> dirs = sample_directions(2, 64);
  const auto s = control_set_sandwich(sys, {0.0}, dirs);
  const auto& f = s.fibers.front();
  CHECK(f.max_gap() < 1e-3);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (std::abs(std::abs(dirs[i](0)) - 1.0) < 1e-12) CHECK(f.inner[i] == doctest::Approx(1.0).epsilon(1e-7));
    if (std::abs(std::abs(dirs[i](1)) - 1.0) < 1e-12) CHECK(f.inner[i] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(f.inner[i] <= box_support(dirs[i], 1.0, 0.5) + 1e-9);
  }
}

TEST_CASE("center directions are unbounded") {
  const auto zero = PeriodicSystem::constant(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), 1.0,
                                             ControlRange::symmetric_box(1));
  const auto s = control_set_sandwich(zero, {0.0, 0.5}, {});
  CHECK(s.unbounded);
  CHECK(s.center_dim == 1);
  for (const auto& f : s.fibers) {
    CHECK(std::isinf(f.inner[0]));
    CHECK(std::isinf(f.outer[1]));
  }
  // Harmonic oscillator plus a stable direction: E0 is a plane.
  MatrixXd a = MatrixXd::Zero(3, 3);
  a(0, 1) = -1.0;
  a(1, 0) = 1.0;
  a(2, 2) = -1.0;
  const auto osc = PeriodicSystem::constant(a, MatrixXd::Ones(3, 1), 1.0, ControlRange::symmetric_box(1));
  const std::vector<VectorXd> dirs = {VectorXd::Unit(3, 0), VectorXd::Unit(3, 2), -VectorXd::Unit(3, 2)};
  const auto so = control_set_sandwich(osc, {0.0}, dirs);
  CHECK(so.unbounded);
  CHECK(so.center_dim == 2);
  CHECK(std::isinf(so.fibers[0].inner[0]));
  CHECK(so.fibers[0].inner[1] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("scalar trichotomy and hypothesis gate") {
  const auto pos = PeriodicSystem::constant(MatrixXd::Constant(1, 1, 0.5), MatrixXd::Ones(1, 1), 1.0,
                                            ControlRange::symmetric_box(1));
  const auto sp = control_set_sandwich(pos, {0.0}, {});
  CHECK_FALSE(sp.unbounded);
  CHECK(sp.fibers[0].stable_basis.cols() == 0);
  CHECK(sp.fibers[0].inner[0] == doctest::Approx(2.0).epsilon(1e-7));
  const auto sn = control_set_sandwich(cli::builtin_system("example61"), {0.0}, {});
  CHECK(sn.fibers[0].unstable_basis.cols() == 0);

  MatrixXd b = MatrixXd::Zero(2, 1);
  b(0, 0) = 1.0;
  const auto unctrl = PeriodicSystem::constant(-MatrixXd::Identity(2, 2), b, 1.0, ControlRange::symmetric_box(1));
  CHECK_THROWS_AS(control_set_sandwich(unctrl, {0.0}, {}), HypothesisViolated);
  const auto offset = PeriodicSystem::constant(MatrixXd::Constant(1, 1, -1.0), MatrixXd::Ones(1, 1), 1.0,
                                               ControlRange(ControlRange::Box{VectorXd::Constant(1, 0.1),
                                                                              VectorXd::Constant(1, 1.0)}));
  CHECK_THROWS_AS(control_set_sandwich(offset, {0.0}, {}), HypothesisViolated);
  CHECK_THROWS_AS(control_set_sandwich(pos, {}, {}), InvalidArgument);
}

TEST_CASE("example 6.1 fibers across the grid and parallel determinism") {
  const auto sys = cli::builtin_system("example61");
  const auto grid = uniform_tau_grid(sys, 16);
  SandwichOptions serial;
  serial.threads = 1;
  SandwichOptions par;
  par.threads = 4;
  const auto a = control_set_sandwich(sys, grid, {}, serial);
  const auto b = control_set_sandwich(sys, grid, {}, par);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.fibers[i].inner[0] == doctest::Approx(oracle::radius61(grid[i])).epsilon(1e-9));
    CHECK(a.fibers[i].inner == b.fibers[i].inner);
    CHECK(a.fibers[i].outer == b.fibers[i].outer);
  }
}

TEST_CASE("periodic non-autonomous saddle") {
  // Time-varying coupling on top of a saddle keeps one stable and one unstable exponent.
  MatrixXd a0(2, 2), a1(2, 2);
  a0 << 1.0, 0.3, 0.0, -1.0;
  a1 << 0.8, -0.5, 0.4, -1.2;
  const PeriodicSystem sys(1.0, {{0.0, 0.4, a0, MatrixXd::Ones(2, 1)}, {0.4, 1.0, a1, (MatrixXd(2, 1) << 1, -0.5).finished()}},
                           ControlRange::symmetric_box(1));
  const auto dirs = sample_directions(2, 32);
  const auto s = control_set_sandwich(sys, {0.0, 0.3, 0.7}, dirs);
  for (const auto& f : s.fibers) {
    CHECK(f.stable_basis.cols() == 1);
    CHECK(f.unstable_basis.cols() == 1);
    CHECK(f.max_gap() < 1e-3);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      CHECK(f.inner[i] > 0.0);
      CHECK(f.theorem_inner[i] <= f.inner[i] + 1e-7);
      CHECK(f.outer[i] <= f.theorem_outer[i] + 1e-9);
    }
  }
}
