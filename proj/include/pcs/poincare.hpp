#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pcs/control_set.hpp"
#include "pcs/periodic_system.hpp"

namespace pcs {

inline constexpr double kEquatorTol = 1e-12;

/// A point (τ, s) of 𝕊¹ × 𝕊ᵈ with s ∈ ℝ^{d+1} of unit norm.
struct SpherePoint {
  double phase = 0.0;
  VectorXd s;

  bool on_equator() const { return std::abs(s(s.size() - 1)) <= kEquatorTol; }
  bool upper() const { return s(s.size() - 1) > kEquatorTol; }
};

struct SphereTrajectory {
  std::vector<double> times;
  std::vector<SpherePoint> points;
  ControlSignal control;
  double max_norm_drift = 0.0;  // largest |‖s‖ - 1| before renormalization
};

/// (τ, (x, 1)/√(1 + ‖x‖²)).
SpherePoint embed(double tau, const VectorXd& x);

/// (τ, s_{1..d} / s_{d+1}); DomainError unless s_{d+1} > kEquatorTol.
std::pair<double, VectorXd> unembed(const SpherePoint& p);

/// Projected vector field on the sphere at time τ with control value u.
VectorXd sphere_vector_field(const PeriodicSystem& sys, double tau, const VectorXd& s,
                             const VectorXd& u);

/// (A(τ) - sᵀA(τ)s I) s for unit s ∈ ℝᵈ.
VectorXd equator_vector_field(const PeriodicSystem& sys, double tau, const VectorXd& s);

/// Fixed-step RK4 from time p0.phase to t_end; steps are shortened at
/// coefficient and control switches and s is renormalized after every step.
SphereTrajectory integrate_sphere(const PeriodicSystem& sys, const SpherePoint& p0,
                                  const ControlSignal& u, double t_end, double step);

struct ProjectedFiber {
  double tau = 0.0;
  std::vector<SpherePoint> inner;  // embedded inner support points
  std::vector<SpherePoint> outer;  // embedded radial outer boundary; equator where unbounded
  double min_height = 0.0;         // smallest s_{d+1} over both clouds
};

struct ProjectedControlSet {
  std::vector<ProjectedFiber> fibers;
  MatrixXd equator_basis;                 // E^0 at the first grid phase, as equator directions
  std::vector<SpherePoint> equator_points;  // (±e, 0) for each basis column
};

/// Embeds the sandwich fibers on the Poincaré sphere. The outer cloud uses
/// `samples` radial directions. Throws NumericalError if a bounded set reaches
/// the equator.
ProjectedControlSet project_control_set(const ControlSetSandwich& sandwich, int samples);

}  // namespace pcs
