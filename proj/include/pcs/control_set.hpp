#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pcs/floquet.hpp"
#include "pcs/periodic_system.hpp"
#include "pcs/reachable.hpp"

namespace pcs {

struct SandwichOptions {
  int k_max = 64;
  double tol_conv = 1e-8;
  double tol_rank = 1e-10;         // Gramian test
  double center_tol = 1e-9;        // |E0ᵀp| above this makes p an unbounded direction
  FloquetTolerances floquet;
  QuadratureOptions quadrature;
  unsigned threads = 0;            // 0 = hardware concurrency
};

/// Support of one bounded spectral component K_τ^± in ambient coordinates:
/// the limit of Π R_k (stable) or Π C_k (unstable) with Π the oblique
/// projector onto the component.
class ComponentSupport {
 public:
  enum class Side { Stable, Unstable };

  ComponentSupport(const PeriodicSystem& sys, double tau, Side side, const MatrixXd& projector,
                   int subspace_dim, const SandwichOptions& options);

  int subspace_dim() const { return subspace_dim_; }

  /// Iterated support; throws NumericalError when the increments have not
  /// settled after k_max periods.
  SeriesResult evaluate(const VectorXd& p) const;

  /// Point of the k-period approximation maximizing ⟨p, ·⟩.
  VectorXd support_point(const VectorXd& p, int periods) const;

 private:
  int subspace_dim_;
  Side side_;
  double tau_;
  int k_max_;
  double tol_conv_;
  std::optional<SupportSeries> series_;
};

/// K_τ^- in orthonormal E_τ^- coordinates. Empty directions select the
/// default sample. A trivial E_τ^- yields the zero set in dimension 0.
ConvexSetApprox bounded_component_minus(const PeriodicSystem& sys, double tau, int k_max,
                                        const std::vector<VectorXd>& directions,
                                        double tol_conv = 1e-8, const SandwichOptions& options = {});

/// K_τ^+ in orthonormal E_τ^+ coordinates.
ConvexSetApprox bounded_component_plus(const PeriodicSystem& sys, double tau, int k_max,
                                       const std::vector<VectorXd>& directions,
                                       double tol_conv = 1e-8, const SandwichOptions& options = {});

/// One phase of the sandwich. Support vectors are indexed like `directions`;
/// directions not orthogonal to E_τ^0 carry +infinity.
struct FiberSandwich {
  double tau = 0.0;
  MatrixXd stable_basis;
  MatrixXd center_basis;
  MatrixXd unstable_basis;
  ConvexSetApprox k_minus;  // E^- coordinates
  ConvexSetApprox k_plus;   // E^+ coordinates
  MatrixXd y;               // X(dT + τ, τ)
  MatrixXd y_inv;
  double basis_condition = 1.0;

  std::vector<VectorXd> directions;
  std::vector<double> inner;           // K^- ⊕ E^0 ⊕ K^+, finite-k supports
  std::vector<double> outer;           // same set, tail-bounded supports
  std::vector<double> theorem_inner;   // Y K^- ⊕ E^0 ⊕ Y^{-1} K^+
  std::vector<double> theorem_outer;   // Y^{-1} K^- ⊕ E^0 ⊕ Y K^+
  std::vector<VectorXd> inner_points;  // maximizers for bounded directions, else empty
  std::vector<int> periods;            // periods used per direction (max of both sides)

  /// Largest outer - inner over bounded directions.
  double max_gap() const;
};

struct ControlSetSandwich {
  std::vector<double> tau_grid;
  std::vector<FiberSandwich> fibers;
  int center_dim = 0;
  bool unbounded = false;
  GramianResult gramian;
};

/// Uniform grid of n phases in [0, T).
std::vector<double> uniform_tau_grid(const PeriodicSystem& sys, int n);

/// Inner and outer approximations of the fibers of the control set D^a.
/// Throws HypothesisViolated if the unconstrained system is not controllable.
ControlSetSandwich control_set_sandwich(const PeriodicSystem& sys, const std::vector<double>& tau_grid,
                                        const std::vector<VectorXd>& directions,
                                        const SandwichOptions& options = {});

}  // namespace pcs
