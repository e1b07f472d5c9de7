#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "pcs/cli/builtins.hpp"
#include "pcs/errors.hpp"
#include "pcs/floquet.hpp"
#include "pcs/linalg.hpp"

using namespace pcs;

TEST_CASE("monodromy examples") {
  CHECK(monodromy(cli::builtin_system("example61"), 0.0)(0, 0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  const auto zero = PeriodicSystem::constant(MatrixXd::Zero(3, 3), MatrixXd::Ones(3, 1), 2.0,
                                             ControlRange::symmetric_box(1));
  CHECK(monodromy(zero, 0.7).isIdentity(1e-15));
  const MatrixXd m = monodromy(cli::builtin_system("example62"), 0.3);
  CHECK(m(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(m(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(m(0, 1)) + std::abs(m(1, 0)) < 1e-15);
}

TEST_CASE("floquet_spectrum grouping") {
  const auto g1 = floquet_spectrum(MatrixXd::Constant(1, 1, std::exp(-3.0)), 2.0);
  REQUIRE(g1.size() == 1);
  CHECK(g1[0].exponent == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(g1[0].multiplicity == 1);

  const auto g2 = floquet_spectrum(MatrixXd::Identity(3, 3), 5.0);
  REQUIRE(g2.size() == 1);
  CHECK(g2[0].exponent == 0.0);
  CHECK(g2[0].multiplicity == 3);

  MatrixXd d(2, 2);
  d << std::exp(1.0), 0, 0, std::exp(-1.0);
  const auto g3 = floquet_spectrum(d, 1.0);
  REQUIRE(g3.size() == 2);
  CHECK(g3[0].exponent == doctest::Approx(-1.0));
  CHECK(g3[1].exponent == doctest::Approx(1.0));

  // A rotation pair stays in one group with |μ| = 2.
  MatrixXd rot(3, 3);
  rot << 0, -2, 0, 2, 0, 0, 0, 0, 0.5;
  const auto g4 = floquet_spectrum(rot, 1.0);
  REQUIRE(g4.size() == 2);
  CHECK(g4[1].multiplicity == 2);
  CHECK(g4[1].exponent == doctest::Approx(std::log(2.0)));

  CHECK_THROWS_AS(floquet_spectrum(MatrixXd::Zero(2, 2), 1.0), NumericalError);
  CHECK_THROWS_AS(floquet_spectrum(MatrixXd::Identity(2, 2), -1.0), InvalidArgument);
}

TEST_CASE("floquet spaces of the examples") {
  const auto fd62 = floquet_spaces(cli::builtin_system("example62"), 0.4);
  REQUIRE(fd62.unstable.cols() == 1);
  REQUIRE(fd62.stable.cols() == 1);
  CHECK(fd62.center.cols() == 0);
  CHECK(std::abs(std::abs(fd62.unstable(0, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(fd62.stable(1, 0)) - 1.0) < 1e-14);
  CHECK(fd62.center_stable.cols() == 1);
  CHECK(fd62.center_unstable.cols() == 1);

  const auto zero = PeriodicSystem::constant(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2), 1.0,
                                             ControlRange::symmetric_box(2));
  const auto fd0 = floquet_spaces(zero, 0.0);
  CHECK(fd0.center.cols() == 2);
  CHECK(fd0.stable.cols() + fd0.unstable.cols() == 0);

  const auto sys61 = cli::builtin_system("example61");
  for (double tau : {0.0, 0.5, 1.0, 1.7}) CHECK(floquet_spaces(sys61, tau).stable.cols() == 1);
}

TEST_CASE("defective monodromy is grouped as one Floquet space") {
  MatrixXd a(3, 3);
  a << -0.5, 1.0, 0.0,
       0.0, -0.5, 0.0,
       0.0, 0.0, 0.8;
  const auto sys = PeriodicSystem::constant(a, MatrixXd::Ones(3, 1), 1.0, ControlRange::symmetric_box(1));
  const auto fd = floquet_spaces(sys, 0.0);
  REQUIRE(fd.groups.size() == 2);
  CHECK(fd.groups[0].multiplicity == 2);
  CHECK(fd.groups[0].exponent == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fd.groups[1].multiplicity == 1);
  MatrixXd expected = MatrixXd::Zero(3, 2);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK(max_principal_angle(fd.stable, expected) < 1e-9);
}

TEST_CASE("defective monodromy in a rotated basis") {
  MatrixXd j(3, 3);
  j << -0.5, 1.0, 0.0,
       0.0, -0.5, 0.0,
       0.0, 0.0, 0.8;
  MatrixXd q = Eigen::HouseholderQR<MatrixXd>(MatrixXd::Random(3, 3)).householderQ();
  const auto sys = PeriodicSystem::constant(q * j * q.transpose(), MatrixXd::Ones(3, 1), 1.0,
                                            ControlRange::symmetric_box(1));
  const auto fd = floquet_spaces(sys, 0.0);
  REQUIRE(fd.groups.size() == 2);
  CHECK(fd.groups[0].multiplicity == 2);
  CHECK(fd.groups[0].exponent == doctest::Approx(-0.5).epsilon(1e-7));
  CHECK(max_principal_angle(fd.stable, q.leftCols(2)) < 1e-7);
  // Well separated moduli with orthogonal eigenvectors stay apart.
  const auto close = PeriodicSystem::constant(Eigen::Vector2d(-0.5, -0.5 + 1e-5).asDiagonal().toDenseMatrix(),
                                              MatrixXd::Ones(2, 1), 1.0, ControlRange::symmetric_box(1));
  CHECK(floquet_spaces(close, 0.0).groups.size() == 2);
}

TEST_CASE("tolerance conflicts are reported") {
  // |μ| = 1 ± 2e-8 lies in one group at tol_group = 1e-7 but straddles the
  // center band at tol_center = 1e-8.
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0 - 2e-8;
  m(1, 1) = 1.0 + 1e-9;
  const auto sys = PeriodicSystem::constant(MatrixXd(m.diagonal().array().log().matrix().asDiagonal()),
                                            MatrixXd::Ones(2, 1), 1.0, ControlRange::symmetric_box(1));
  CHECK_THROWS_AS(floquet_spaces(sys, 0.0, {1e-7, 1e-8}), NumericalError);
  CHECK_NOTHROW(floquet_spaces(sys, 0.0, {1e-9, 1e-8}));
}

TEST_CASE("transported subspaces agree with recomputed ones") {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 8; ++trial) {
    const auto sys = oracle::random_system(rng, 3, 1, 2, 1.0, 0.9);
    FloquetDecomposition fd0;
    try {
      fd0 = floquet_spaces(sys, 0.0);
    } catch (const NumericalError&) {
      continue;
    }
    if (fd0.stable.cols() == 0 || fd0.center.cols() > 0) continue;
    for (double tau : {0.25, 0.6}) {
      const auto fd = floquet_spaces(sys, tau);
      CHECK(max_principal_angle(transport_subspace(sys, fd0.stable, tau), fd.stable) < 1e-7);
    }
    ++checked;
  }
  CHECK(checked >= 4);
  const auto sys62 = cli::builtin_system("example62");
  const auto fd = floquet_spaces(sys62, 0.0);
  CHECK(max_principal_angle(transport_subspace(sys62, fd.unstable, 0.8), fd.unstable) < 1e-14);
  CHECK(max_principal_angle(transport_subspace(sys62, fd.stable, 0.0), fd.stable) < 1e-15);
}

TEST_CASE("spectral projectors reproduce the splitting") {
  MatrixXd a(3, 3);
  a << 1.0, 0.5, 0.2, 0.0, -1.0, 0.3, 0.0, 0.0, 0.0;
  const auto sys = PeriodicSystem::constant(a, MatrixXd::Ones(3, 1), 1.0, ControlRange::symmetric_box(1));
  const auto fd = floquet_spaces(sys, 0.0);
  const auto p = spectral_projectors(fd);
  CHECK((p.stable + p.center + p.unstable - MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((p.stable * p.stable - p.stable).norm() < 1e-12);
  CHECK((p.stable * fd.stable - fd.stable).norm() < 1e-12);
  CHECK((p.stable * fd.unstable).norm() < 1e-12);
  CHECK((p.unstable * fd.monodromy - fd.monodromy * p.unstable).norm() < 1e-12);
}
