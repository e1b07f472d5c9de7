#include "pcs/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcs/errors.hpp"
#include "pcs/reachable.hpp"

namespace pcs {

SpherePoint embed(double tau, const VectorXd& x) {
  if (!x.allFinite()) throw InvalidArgument("embed: non-finite state");
  const auto d = x.size();
  VectorXd s(d + 1);
  s.head(d) = x;
  s(d) = 1.0;
  return {tau, s / std::sqrt(1.0 + x.squaredNorm())};
}

std::pair<double, VectorXd> unembed(const SpherePoint& p) {
  const auto d = p.s.size() - 1;
  if (d < 1) throw InvalidArgument("unembed: sphere point too short");
  const double h = p.s(d);
  if (!(h > kEquatorTol)) throw DomainError("unembed: point is not in the open upper hemisphere");
  return {p.phase, p.s.head(d) / h};
}

namespace {

VectorXd field(const MatrixXd& a, const MatrixXd& b, const VectorXd& s, const VectorXd& u) {
  const auto d = a.rows();
  const VectorXd x = s.head(d);
  const double h = s(d);
  VectorXd out(d + 1);
  const double q = x.dot(a * x);
  out.head(d) = a * x - q * x;
  out(d) = -q * h;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    if (u(i) == 0.0) continue;
    const VectorXd bi = b.col(i);
    const double c = x.dot(bi) * h;
    out.head(d) += u(i) * (-c * x + bi * h);
    out(d) += u(i) * (-c * h);
  }
  return out;
}

}  // namespace

VectorXd sphere_vector_field(const PeriodicSystem& sys, double tau, const VectorXd& s,
                             const VectorXd& u) {
  if (s.size() != sys.dim() + 1) throw InvalidArgument("sphere_vector_field: wrong state size");
  if (u.size() != sys.inputs()) throw InvalidArgument("sphere_vector_field: wrong control size");
  if (!sys.control_range().contains(u, 1e-12)) {
    throw InvalidArgument("sphere_vector_field: control outside U");
  }
  auto [a, b] = sys.coefficients(tau);
  return field(a, b, s, u);
}

VectorXd equator_vector_field(const PeriodicSystem& sys, double tau, const VectorXd& s) {
  if (s.size() != sys.dim()) throw InvalidArgument("equator_vector_field: wrong state size");
  if (std::abs(s.norm() - 1.0) > 1e-10) throw InvalidArgument("equator_vector_field: s must be a unit vector");
  const MatrixXd& a = sys.coefficients(tau).first;
  return a * s - s.dot(a * s) * s;
}

SphereTrajectory integrate_sphere(const PeriodicSystem& sys, const SpherePoint& p0,
                                  const ControlSignal& u, double t_end, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("integrate_sphere: step must be positive");
  if (p0.s.size() != sys.dim() + 1) throw InvalidArgument("integrate_sphere: wrong state size");
  if (std::abs(p0.s.norm() - 1.0) > 1e-10) throw InvalidArgument("integrate_sphere: start must be unit norm");
  const double t0 = p0.phase;
  if (!(t_end >= t0)) throw InvalidArgument("integrate_sphere: t_end precedes the start time");
  if (t_end > t0) {
    if (u.empty() || u.start() > t0 + 1e-12 || u.end() < t_end - 1e-12) {
      throw InvalidArgument("integrate_sphere: control does not cover the horizon");
    }
    u.check_in(sys.control_range());
  }

  std::vector<double> cuts = sys.breakpoints(t0, t_end);
  for (const auto& piece : u.pieces()) {
    for (double c : {piece.start, piece.end}) {
      if (c > t0 && c < t_end) cuts.push_back(c);
    }
  }
  cuts.push_back(t_end);
  std::sort(cuts.begin(), cuts.end());

  SphereTrajectory out;
  out.control = u;
  out.times.push_back(t0);
  out.points.push_back({sys.phase(t0), p0.s});
  VectorXd s = p0.s;
  double t = t0;
  const int d = sys.dim();
  for (double cut : cuts) {
    if (!(cut > t)) continue;
    const double mid = 0.5 * (t + cut);
    auto [a, b] = sys.coefficients(mid);
    const VectorXd uv = u.empty() ? VectorXd::Zero(sys.inputs()) : u.value(mid);
    const long n = std::max(1L, static_cast<long>(std::ceil((cut - t) / step - 1e-9)));
    const double h = (cut - t) / n;
    const double start = t;
    for (long i = 1; i <= n; ++i) {
      const VectorXd k1 = field(a, b, s, uv);
      const VectorXd k2 = field(a, b, s + 0.5 * h * k1, uv);
      const VectorXd k3 = field(a, b, s + 0.5 * h * k2, uv);
      const VectorXd k4 = field(a, b, s + h * k3, uv);
      s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double norm = s.norm();
      out.max_norm_drift = std::max(out.max_norm_drift, std::abs(norm - 1.0));
      s /= norm;
      if (s(d) < 0.0 && s(d) > -kEquatorTol) s(d) = 0.0;
      t = (i == n) ? cut : start + i * h;
      out.times.push_back(t);
      out.points.push_back({sys.phase(t), s});
    }
  }
  return out;
}

ProjectedControlSet project_control_set(const ControlSetSandwich& sandwich, int samples) {
  if (sandwich.fibers.empty()) throw InvalidArgument("project_control_set: empty sandwich");
  if (samples < 1) throw InvalidArgument("project_control_set: samples must be positive");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ProjectedControlSet out;
  const int d = static_cast<int>(sandwich.fibers.front().directions.front().size());
  const auto rays = sample_directions(d, samples);
  for (const auto& f : sandwich.fibers) {
    ProjectedFiber pf;
    pf.tau = f.tau;
    pf.min_height = kInf;
    for (const auto& x : f.inner_points) {
      if (x.size() == 0) continue;
      pf.inner.push_back(embed(f.tau, x));
    }
    for (const auto& v : rays) {
      double rho = kInf;
      for (std::size_t i = 0; i < f.directions.size(); ++i) {
        const double c = f.directions[i].dot(v);
        if (c > 1e-12 && std::isfinite(f.outer[i])) rho = std::min(rho, f.outer[i] / c);
      }
      if (std::isfinite(rho)) {
        pf.outer.push_back(embed(f.tau, rho * v));
      } else {
        VectorXd s = VectorXd::Zero(d + 1);
        s.head(d) = v;
        pf.outer.push_back({f.tau, s});
      }
    }
    for (const auto* cloud : {&pf.inner, &pf.outer}) {
      for (const auto& p : *cloud) pf.min_height = std::min(pf.min_height, p.s(d));
    }
    if (!sandwich.unbounded && !(pf.min_height > 0.0)) {
      throw NumericalError("project_control_set: bounded control set reaches the equator");
    }
    out.fibers.push_back(std::move(pf));
  }
  out.equator_basis = sandwich.fibers.front().center_basis;
  for (Eigen::Index j = 0; j < out.equator_basis.cols(); ++j) {
    for (double sign : {1.0, -1.0}) {
      VectorXd s = VectorXd::Zero(d + 1);
      s.head(d) = sign * out.equator_basis.col(j).normalized();
      out.equator_points.push_back({sandwich.fibers.front().tau, s});
    }
  }
  return out;
}

}  // namespace pcs
