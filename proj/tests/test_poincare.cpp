#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "pcs/cli/builtins.hpp"
#include "pcs/errors.hpp"
#include "pcs/poincare.hpp"

using namespace pcs;

TEST_CASE("embedding and its inverse") {
  const auto north = embed(0.3, VectorXd::Zero(2));
  CHECK(north.s.isApprox((VectorXd(3) << 0, 0, 1).finished()));
  CHECK(north.upper());
  const auto p = embed(0.0, (VectorXd(2) << 1, 0).finished());
  CHECK((p.s - (VectorXd(3) << 1, 0, 1).finished() / std::sqrt(2.0)).norm() < 1e-15);
  CHECK((unembed(p).second - (VectorXd(2) << 1, 0).finished()).norm() < 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    VectorXd x(3);
    for (int k = 0; k < 3; ++k) x(k) = 10 * normal(rng);
    const auto [tau, y] = unembed(embed(0.7, x));
    CHECK(tau == 0.7);
    CHECK((y - x).norm() < 1e-12 * std::max(1.0, x.norm()));
  }
  SpherePoint eq{0.0, (VectorXd(3) << 1, 0, 0).finished()};
  CHECK(eq.on_equator());
  CHECK_THROWS_AS(unembed(eq), DomainError);
  CHECK_THROWS_AS(unembed({0.0, (VectorXd(3) << 0, 0.6, -0.8).finished()}), DomainError);
}

TEST_CASE("projected vector field of example 6.2") {
  const auto sys = cli::builtin_system("example62");
  const VectorXd u0 = VectorXd::Zero(1);
  CHECK(sphere_vector_field(sys, 0.0, (VectorXd(3) << 1, 0, 0).finished(), u0).norm() == 0.0);
  CHECK(sphere_vector_field(sys, 0.0, (VectorXd(3) << 0, 1, 0).finished(), u0).norm() == 0.0);
  // Compare with the explicit form printed for this example.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    VectorXd s(3);
    for (int k = 0; k < 3; ++k) s(k) = normal(rng);
    s.normalize();
    const double u = unit(rng);
    const double s1 = s(0), s2 = s(1), s3 = s(2);
    const double c = u * (s1 * s3 + s2 * s3);
    VectorXd expected(3);
    expected << (1 - s1 * s1 + s2 * s2 - c) * s1 + u * s3, (-1 - s1 * s1 + s2 * s2 - c) * s2 + u * s3,
        (-s1 * s1 + s2 * s2 - c) * s3;
    const VectorXd got = sphere_vector_field(sys, 0.0, s, VectorXd::Constant(1, u));
    CHECK((got - expected).norm() < 1e-14);
    CHECK(std::abs(s.dot(got)) < 1e-14);
  }
  CHECK_THROWS_AS(sphere_vector_field(sys, 0.0, (VectorXd(3) << 0, 0, 1).finished(), VectorXd::Constant(1, 2.0)),
                  InvalidArgument);
}

TEST_CASE("equator field") {
  const auto sys62 = cli::builtin_system("example62");
  for (double th = 0.1; th < 6.2; th += 0.37) {
    const VectorXd s = (VectorXd(2) << std::cos(th), std::sin(th)).finished();
    const VectorXd f = equator_vector_field(sys62, 0.0, s);
    CHECK(f(0) == doctest::Approx(2 * s(1) * s(1) * s(0)));
    CHECK(f(1) == doctest::Approx(-2 * s(0) * s(0) * s(1)));
    VectorXd full(3);
    full << s, 0.0;
    const VectorXd g = sphere_vector_field(sys62, 0.0, full, VectorXd::Constant(1, 0.4));
    CHECK(g.head(2) == f);
    CHECK(g(2) == 0.0);
  }
  const auto sys63 = cli::builtin_system("example63");
  CHECK(equator_vector_field(sys63, 0.0, (VectorXd(2) << 1, 0).finished()).norm() == 0.0);
  CHECK(equator_vector_field(sys63, 0.0, (VectorXd(2) << 0, -1).finished()).norm() == 0.0);
  // Interior of the circle flows from (±1,0) towards (0,±1).
  const VectorXd s = (VectorXd(2) << std::cos(0.3), std::sin(0.3)).finished();
  const VectorXd f = equator_vector_field(sys63, 0.0, s);
  CHECK((-s(1) * f(0) + s(0) * f(1)) > 0.0);
  CHECK_THROWS_AS(equator_vector_field(sys63, 0.0, (VectorXd(2) << 1, 1).finished()), InvalidArgument);
}

TEST_CASE("sphere trajectories") {
  const auto sys = cli::builtin_system("example62");
  const auto u0 = ControlSignal::constant(0.0, 5.0, VectorXd::Zero(1));
  const auto north = integrate_sphere(sys, embed(0.0, VectorXd::Zero(2)), u0, 5.0, 1e-2);
  for (const auto& p : north.points) CHECK((p.s - (VectorXd(3) << 0, 0, 1).finished()).norm() < 1e-15);

  std::mt19937_64 rng(5);
  const auto u = oracle::random_control(rng, 1, 0.0, 5.0, 10);
  SpherePoint eq{0.0, (VectorXd(3) << 0.6, 0.8, 0.0).finished()};
  const auto tr = integrate_sphere(sys, eq, u, 5.0, 1e-2);
  for (const auto& p : tr.points) CHECK(std::abs(p.s(2)) < 1e-9);
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);

  const auto up = integrate_sphere(sys, embed(0.0, (VectorXd(2) << 3, -2).finished()), u, 5.0, 1e-2);
  for (const auto& p : up.points) CHECK(p.s(2) > 0.0);

  CHECK_THROWS_AS(integrate_sphere(sys, eq, u, 5.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(integrate_sphere(sys, eq, u, 6.0, 1e-2), InvalidArgument);
}

TEST_CASE("projected control sets") {
  const auto sys = cli::builtin_system("example62");
  const auto s = control_set_sandwich(sys, {0.0}, sample_directions(2, 64));
  const auto proj = project_control_set(s, 64);
  CHECK(proj.equator_points.empty());
  CHECK(proj.fibers[0].min_height == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-7));

  const auto zero = PeriodicSystem::constant(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), 1.0,
                                             ControlRange::symmetric_box(1));
  const auto pz = project_control_set(control_set_sandwich(zero, {0.0}, {}), 2);
  REQUIRE(pz.equator_points.size() == 2);
  CHECK(std::abs(std::abs(pz.equator_points[0].s(0)) - 1.0) < 1e-15);
  CHECK(pz.equator_points[0].s(1) == 0.0);
  CHECK(pz.equator_points[0].s(0) == -pz.equator_points[1].s(0));
  CHECK(pz.fibers[0].min_height == 0.0);
}
