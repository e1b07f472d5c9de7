#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "pcs/errors.hpp"
#include "pcs/quasi_affine.hpp"

using namespace pcs;

namespace {

QuasiAffineSystem scalar_envelope_system() {
  return QuasiAffineSystem({MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, 1.0)},
                           AffineInput{{MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1)}}, ControlRange::symmetric_box(1),
                           ControlRange::symmetric_box(1, 0.5));
}

PeriodicSystem scalar(double a) {
  return PeriodicSystem::constant(MatrixXd::Constant(1, 1, a), MatrixXd::Ones(1, 1), 1.0,
                                  ControlRange::symmetric_box(1));
}

}  // namespace

TEST_CASE("freezing periodic parameters") {
  MatrixXd a0(2, 2), a1(2, 2);
  a0 << 0, 1, 0, 0;
  a1 << 0, 0, 1, 0;
  const QuasiAffineSystem q({a0, a1}, AffineInput{{MatrixXd::Ones(2, 1), MatrixXd::Zero(2, 1)}},
                            ControlRange::symmetric_box(1), ControlRange::symmetric_box(1));
  PeriodicParameterSignal v{2.0, {{0.0, 1.0, VectorXd::Constant(1, 1.0)}, {1.0, 2.0, VectorXd::Constant(1, -1.0)}}};
  const auto sys = freeze_periodic(q, v);
  CHECK(sys.segments().size() == 2);
  CHECK(eval_coeffs(sys, 0.5).first.isApprox(a0 + a1));
  CHECK(eval_coeffs(sys, 1.5).first.isApprox(a0 - a1));
  const auto s0 = freeze_periodic(q, PeriodicParameterSignal::constant(3.0, VectorXd::Zero(1)));
  CHECK(eval_coeffs(s0, 2.9).first == a0);
  CHECK(s0.period() == 3.0);
  CHECK_THROWS_AS(freeze_periodic(q, PeriodicParameterSignal::constant(1.0, VectorXd::Constant(1, 2.0))),
                  InvalidArgument);
}

TEST_CASE("multilinear B table") {
  TableInput tab;
  tab.axes = {{-1.0, 1.0}, {0.0, 1.0, 2.0}};
  for (double v1 : tab.axes[0])
    for (double v2 : tab.axes[1]) tab.values.push_back(MatrixXd::Constant(1, 1, 3.0 + 2.0 * v1 - v2 + v1 * v2));
  const QuasiAffineSystem q({MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)}, tab,
                            ControlRange::symmetric_box(1),
                            ControlRange(ControlRange::Box{(VectorXd(2) << -1, -0.5).finished(),
                                                           (VectorXd(2) << 1, 2).finished()}));
  for (double v1 : {-1.0, -0.3, 0.4, 1.0})
    for (double v2 : {0.0, 0.25, 1.5, 2.0}) {
      const VectorXd v = (VectorXd(2) << v1, v2).finished();
      CHECK(q.b_of(v)(0, 0) == doctest::Approx(3.0 + 2.0 * v1 - v2 + v1 * v2).epsilon(1e-14));
    }
  CHECK_THROWS_AS(q.b_of((VectorXd(2) << 0.0, -0.5).finished()), DomainError);
}

TEST_CASE("system validation") {
  CHECK_THROWS_AS(QuasiAffineSystem({MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)},
                                    AffineInput{{MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1)}},
                                    ControlRange::symmetric_box(1),
                                    ControlRange(ControlRange::Box{VectorXd::Constant(1, 0.1), VectorXd::Constant(1, 1.0)})),
                  InvalidArgument);
  CHECK_THROWS_AS(QuasiAffineSystem({MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)},
                                    AffineInput{{MatrixXd::Ones(1, 1)}}, ControlRange::symmetric_box(1),
                                    ControlRange::symmetric_box(1)),
                  InvalidArgument);
  CHECK_THROWS_AS(QuasiAffineSystem({MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)},
                                    AffineInput{{MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1)}},
                                    ControlRange::symmetric_box(1), std::nullopt),
                  InvalidArgument);
}

TEST_CASE("periodic fixed points") {
  const auto u = ControlSignal::constant(0.0, 1.0, VectorXd::Constant(1, 0.4));
  CHECK(periodic_fixed_point(scalar(-1.0), u)(0) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(periodic_fixed_point(scalar(1.0), u)(0) == doctest::Approx(-0.4).epsilon(1e-13));
  CHECK(periodic_fixed_point(scalar(-1.0), ControlSignal::constant(0.0, 2.0, VectorXd::Zero(1))).norm() == 0.0);
  CHECK_THROWS_AS(periodic_fixed_point(scalar(0.0), u), HypothesisViolated);
  CHECK_THROWS_AS(periodic_fixed_point(scalar(-1.0), ControlSignal::constant(0.0, 1.5, VectorXd::Zero(1))),
                  InvalidArgument);

  std::mt19937_64 rng(19);
  int done = 0;
  while (done < 10) {
    const auto sys = oracle::random_system(rng, 2, 1, 2, 1.0, 0.8);
    try {
      require_hyperbolic(sys);
    } catch (const HypothesisViolated&) {
      continue;
    }
    const auto uu = oracle::random_control(rng, 1, 0.0, 2.0, 6);
    const VectorXd y = periodic_fixed_point(sys, uu);
    CHECK((solve(sys, 2.0, 0.0, y, uu) - y).norm() < 1e-8);
    ++done;
  }
}

TEST_CASE("scalar envelope example") {
  const auto q = scalar_envelope_system();
  std::vector<PeriodicParameterSignal> family;
  for (double v : {-0.5, 0.0, 0.5}) family.push_back(PeriodicParameterSignal::constant(1.0, VectorXd::Constant(1, v)));
  UnionOptions opts;
  opts.tau_grid_n = 2;
  const auto r = union_control_set(q, family, opts);
  REQUIRE(r.members.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(r.members[i].ok);
    const double vbar = -0.5 + 0.5 * i;
    for (double h : r.members[i].projected_support) CHECK(h == doctest::Approx(1.0 / (1.0 - vbar)).epsilon(1e-7));
  }
  for (double h : r.envelope) CHECK(h == doctest::Approx(2.0).epsilon(1e-7));
  CHECK_FALSE(r.hypotheses.empty());
  // Smaller family, smaller envelope.
  const auto small = union_control_set(q, {family[0], family[1]}, opts);
  for (std::size_t j = 0; j < r.envelope.size(); ++j) CHECK(small.envelope[j] <= r.envelope[j] + 1e-12);
}

TEST_CASE("non-hyperbolic members are skipped and logged") {
  // ẋ = v x + u with V = [-1, 1]: v ≡ 0 is a center case.
  const QuasiAffineSystem q({MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1)},
                            AffineInput{{MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1)}},
                            ControlRange::symmetric_box(1), ControlRange::symmetric_box(1));
  const auto family = default_family(q, 1.0);
  const auto r = union_control_set(q, family, {});
  std::size_t skipped = 0;
  for (const auto& m : r.members) skipped += !m.ok;
  CHECK(skipped >= 1);
  CHECK(r.log.size() == skipped);
  for (const auto& m : r.members) {
    if (!m.ok) continue;
    for (std::size_t j = 0; j < m.projected_support.size(); ++j) {
      CHECK(m.projected_support[j] <= r.envelope[j] + 1e-12);
      CHECK(m.projected_support[j] > 0.0);
    }
  }
}

TEST_CASE("autonomous specialization with no parameters") {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  const QuasiAffineSystem q({a}, AffineInput{{MatrixXd::Ones(2, 1)}}, ControlRange::symmetric_box(1), std::nullopt);
  const auto family = default_family(q, 1.0);
  REQUIRE(family.size() == 1);
  UnionOptions opts;
  opts.tau_grid_n = 1;
  const auto r = union_control_set(q, family, opts);
  for (std::size_t j = 0; j < r.directions.size(); ++j) {
    CHECK(r.envelope[j] == doctest::Approx(r.directions[j].cwiseAbs().sum()).epsilon(1e-6));
  }
}

TEST_CASE("default family") {
  const auto q = scalar_envelope_system();
  const auto fam = default_family(q, 2.0);
  // 3 constants + 6 two-piece + 72 four-piece non-repeating patterns = 81, thinned to 64.
  CHECK(fam.size() == 64);
  CHECK(fam.front().pieces.size() == 1);
  const auto all = default_family(q, 2.0, 1000);
  CHECK(all.size() == 3 + 6 + 72);
  for (const auto& s : all) CHECK(s.period == 2.0);
}
