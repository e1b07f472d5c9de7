#include "pcs/control_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcs/errors.hpp"
#include "pcs/linalg.hpp"
#include "pcs/parallel.hpp"

namespace pcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PhaseSpectrum {
  FloquetDecomposition fd;
  SpectralProjectors proj;
};

PhaseSpectrum phase_spectrum(const PeriodicSystem& sys, double tau, const SandwichOptions& o) {
  PhaseSpectrum s{floquet_spaces(sys, tau, o.floquet), {}};
  s.proj = spectral_projectors(s.fd);
  return s;
}

ConvexSetApprox component_in_coordinates(const ComponentSupport& cs, const MatrixXd& basis,
                                         std::vector<VectorXd> directions) {
  ConvexSetApprox out;
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return out;
  if (directions.empty()) directions = sample_directions(k, default_direction_count(k));
  for (const auto& w : directions) {
    if (w.size() != k) throw InvalidArgument("component directions must match the subspace dimension");
    const double n = w.norm();
    if (!(n > 0.0)) throw InvalidArgument("component directions must be nonzero");
    const VectorXd unit = w / n;
    out.directions.push_back(unit);
    out.support.push_back(cs.evaluate(basis * unit).lower);
    out.unbounded.push_back(false);
  }
  return out;
}

}  // namespace

ComponentSupport::ComponentSupport(const PeriodicSystem& sys, double tau, Side side,
                                   const MatrixXd& projector, int subspace_dim,
                                   const SandwichOptions& options)
    : subspace_dim_(subspace_dim),
      side_(side),
      tau_(sys.phase(tau)),
      k_max_(options.k_max),
      tol_conv_(options.tol_conv) {
  if (k_max_ < 1) throw InvalidArgument("k_max must be at least 1");
  if (!(tol_conv_ > 0.0)) throw InvalidArgument("tol_conv must be positive");
  if (subspace_dim_ == 0) return;
  if (side == Side::Stable) {
    series_.emplace(sys, 0.0, tau_, options.quadrature, projector);
  } else {
    // Points steerable from phase τ to the origin at a phase-0 time, written as
    // reachable sets of the reversal at μ = τ.
    series_.emplace(time_reverse(sys, tau_), tau_, 0.0, options.quadrature, projector);
  }
}

SeriesResult ComponentSupport::evaluate(const VectorXd& p) const {
  if (!series_) {
    SeriesResult zero;
    zero.values = {0.0};
    zero.upper = 0.0;
    zero.converged = true;
    return zero;
  }
  SeriesResult r = series_->accumulate(p, k_max_, tol_conv_);
  if (!r.converged) {
    const double last = r.values.back() - r.values[r.values.size() - 2];
    std::ostringstream msg;
    msg << (side_ == Side::Stable ? "stable" : "unstable") << " component at tau=" << tau_
        << " did not converge in " << k_max_ << " periods (last increment " << last
        << ", tol " << tol_conv_ << ")";
    throw NumericalError(msg.str());
  }
  return r;
}

VectorXd ComponentSupport::support_point(const VectorXd& p, int periods) const {
  if (!series_) return VectorXd::Zero(p.size());
  return series_->support_point(p, periods);
}

ConvexSetApprox bounded_component_minus(const PeriodicSystem& sys, double tau, int k_max,
                                        const std::vector<VectorXd>& directions, double tol_conv,
                                        const SandwichOptions& options) {
  SandwichOptions o = options;
  o.k_max = k_max;
  o.tol_conv = tol_conv;
  const PhaseSpectrum s = phase_spectrum(sys, tau, o);
  const ComponentSupport cs(sys, tau, ComponentSupport::Side::Stable, s.proj.stable,
                            static_cast<int>(s.fd.stable.cols()), o);
  ConvexSetApprox out = component_in_coordinates(cs, s.fd.stable, directions);
  out.symmetric = sys.control_range().is_symmetric();
  return out;
}

ConvexSetApprox bounded_component_plus(const PeriodicSystem& sys, double tau, int k_max,
                                       const std::vector<VectorXd>& directions, double tol_conv,
                                       const SandwichOptions& options) {
  SandwichOptions o = options;
  o.k_max = k_max;
  o.tol_conv = tol_conv;
  const PhaseSpectrum s = phase_spectrum(sys, tau, o);
  const ComponentSupport cs(sys, tau, ComponentSupport::Side::Unstable, s.proj.unstable,
                            static_cast<int>(s.fd.unstable.cols()), o);
  ConvexSetApprox out = component_in_coordinates(cs, s.fd.unstable, directions);
  out.symmetric = sys.control_range().is_symmetric();
  return out;
}

double FiberSandwich::max_gap() const {
  double g = 0.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (std::isfinite(outer[i])) g = std::max(g, outer[i] - inner[i]);
  }
  return g;
}

std::vector<double> uniform_tau_grid(const PeriodicSystem& sys, int n) {
  if (n < 1) throw InvalidArgument("tau grid needs at least one point");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = sys.period() * i / n;
  return grid;
}

namespace {

FiberSandwich fiber_at(const PeriodicSystem& sys, double tau, const std::vector<VectorXd>& directions,
                       const SandwichOptions& o) {
  const PhaseSpectrum s = phase_spectrum(sys, tau, o);
  const int d = sys.dim();
  FiberSandwich f;
  f.tau = sys.phase(tau);
  f.stable_basis = s.fd.stable;
  f.center_basis = s.fd.center;
  f.unstable_basis = s.fd.unstable;
  f.basis_condition = s.proj.basis_condition;
  f.y = sys.fundamental(d * sys.period() + f.tau, f.tau);
  f.y_inv = sys.fundamental(f.tau, d * sys.period() + f.tau);

  const ComponentSupport minus(sys, f.tau, ComponentSupport::Side::Stable, s.proj.stable,
                               static_cast<int>(f.stable_basis.cols()), o);
  const ComponentSupport plus(sys, f.tau, ComponentSupport::Side::Unstable, s.proj.unstable,
                              static_cast<int>(f.unstable_basis.cols()), o);
  f.k_minus = component_in_coordinates(minus, f.stable_basis, {});
  f.k_plus = component_in_coordinates(plus, f.unstable_basis, {});
  f.k_minus.symmetric = f.k_plus.symmetric = sys.control_range().is_symmetric();

  const std::size_t n = directions.size();
  f.directions = directions;
  f.inner.assign(n, kInf);
  f.outer.assign(n, kInf);
  f.theorem_inner.assign(n, kInf);
  f.theorem_outer.assign(n, kInf);
  f.inner_points.assign(n, VectorXd());
  f.periods.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const VectorXd& p = directions[i];
    if (p.size() != d) throw InvalidArgument("sandwich direction has wrong dimension");
    if (f.center_basis.cols() > 0 && (f.center_basis.transpose() * p).norm() > o.center_tol) continue;
    const SeriesResult rm = minus.evaluate(p);
    const SeriesResult rp = plus.evaluate(p);
    f.inner[i] = rm.lower + rp.lower;
    f.outer[i] = rm.upper + rp.upper;
    f.periods[i] = std::max(rm.periods, rp.periods);
    f.inner_points[i] = minus.support_point(p, rm.periods) + plus.support_point(p, rp.periods);
    const VectorXd yp = f.y.transpose() * p;
    const VectorXd yip = f.y_inv.transpose() * p;
    f.theorem_inner[i] = minus.evaluate(yp).lower + plus.evaluate(yip).lower;
    f.theorem_outer[i] = minus.evaluate(yip).upper + plus.evaluate(yp).upper;
  }
  return f;
}

}  // namespace

ControlSetSandwich control_set_sandwich(const PeriodicSystem& sys, const std::vector<double>& tau_grid,
                                        const std::vector<VectorXd>& directions,
                                        const SandwichOptions& options) {
  if (tau_grid.empty()) throw InvalidArgument("control_set_sandwich: empty tau grid");
  if (!sys.control_range().is_neighborhood_of_origin()) {
    throw HypothesisViolated("control_set_sandwich: 0 must lie in the interior of U");
  }
  ControlSetSandwich out;
  out.tau_grid = tau_grid;
  out.gramian = controllability_gramian(sys, sys.dim() * sys.period(), options.tol_rank,
                                        options.quadrature);
  if (!out.gramian.controllable) {
    std::ostringstream msg;
    msg << "control_set_sandwich: system with unconstrained controls is not controllable "
        << "(Gramian condition " << out.gramian.condition << ")";
    throw HypothesisViolated(msg.str());
  }
  std::vector<VectorXd> dirs = directions;
  if (dirs.empty()) dirs = sample_directions(sys.dim(), default_direction_count(sys.dim()));
  out.fibers.resize(tau_grid.size());
  parallel_for(
      tau_grid.size(), [&](std::size_t i) { out.fibers[i] = fiber_at(sys, tau_grid[i], dirs, options); },
      options.threads);
  out.center_dim = static_cast<int>(out.fibers.front().center_basis.cols());
  out.unbounded = out.center_dim > 0;
  return out;
}

}  // namespace pcs
