#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pcs/periodic_system.hpp"

namespace pcs {

struct QuadratureOptions {
  int substeps = 32;  // Gauss-Legendre panels per coefficient segment
};

/// A convex set described by sampled (direction, support value) pairs.
/// Unbounded directions carry +infinity and are flagged.
struct ConvexSetApprox {
  std::vector<VectorXd> directions;
  std::vector<double> support;
  std::vector<bool> unbounded;
  bool symmetric = false;

  std::size_t size() const { return directions.size(); }
  int dim() const { return directions.empty() ? 0 : static_cast<int>(directions.front().size()); }

  /// Checks unit directions, finiteness of bounded values, symmetry and
  /// subadditivity on stored triples. Throws NumericalError on violation.
  void validate(double tol = 1e-9) const;
};

/// A state (τ, x) of the autonomized system on S¹ × ℝᵈ.
struct AutonomizedPoint {
  double phase = 0.0;
  VectorXd state;
};

AutonomizedPoint autonomized_point(const PeriodicSystem& sys, double t, const VectorXd& x);

/// Fixed-node quadrature of q ↦ ∫_a^b σ_U(B(s)ᵀ X(b, s)ᵀ q) ds, the support
/// of {∫_a^b X(b,s)B(s)u(s) ds : u ∈ 𝒰} in direction q.
class SupportKernel {
 public:
  SupportKernel(const PeriodicSystem& sys, double a, double b, const QuadratureOptions& quad = {});

  double evaluate(const VectorXd& q) const;
  /// The endpoint reached by the maximizing control.
  VectorXd support_point(const VectorXd& q) const;
  /// Constant c with evaluate(q) <= c‖q‖.
  double bound() const { return bound_; }

 private:
  struct Panel {
    std::size_t first = 0;  // index of the first node in gains_
    std::size_t piece = 0;
    double length = 0.0;
    MatrixXd end_map;     // X(b, panel end)ᵀ
    MatrixXd end_gain;    // gain at the panel end
    MatrixXd start_gain;  // gain at the panel start
  };

  // Integral over one panel, split at switches of the maximizing control.
  double panel_integral(const Panel& panel, const VectorXd& q, VectorXd* point) const;
  double refine(const Panel& panel, const VectorXd& q, double lo, double hi, int depth,
                VectorXd* point) const;
  MatrixXd gain_at(const Panel& panel, double sigma) const;

  ControlRange range_;
  int dim_;
  bool switching_ = false;  // maximizers are piecewise constant in the direction
  std::vector<double> weights_;
  std::vector<MatrixXd> gains_;  // B(s_i)ᵀ X(b, s_i)ᵀ
  std::vector<Panel> panels_;
  std::vector<std::pair<MatrixXd, MatrixXd>> piece_coeffs_;  // (Aᵀ, Bᵀ)
  double bound_ = 0.0;
};

/// Result of iterating a support series over whole periods.
struct SeriesResult {
  std::vector<double> values;  // values[n] = support after n whole periods
  double lower = 0.0;          // last value (support of a subset)
  double upper = std::numeric_limits<double>::infinity();  // tail-bounded limit
  int periods = 0;
  bool converged = false;
  bool diverging = false;
};

/// Supports of the sets {∫_a^b X(b,s)B(s)u(s) ds} with b - a = nT + r, where
/// the start phase a and end phase e are fixed and n varies. The remainder r
/// sits at the start. An optional projector Π commuting with the monodromy at
/// e turns this into the support of Π applied to those sets.
class SupportSeries {
 public:
  SupportSeries(const PeriodicSystem& sys, double start_phase, double end_phase,
                const QuadratureOptions& quad = {}, MatrixXd projector = MatrixXd());

  double remainder() const { return remainder_; }
  const MatrixXd& monodromy() const { return monodromy_; }

  double value(const VectorXd& p, int periods) const;
  VectorXd support_point(const VectorXd& p, int periods) const;

  /// Iterates n = 0, 1, ... up to max_periods and stops once the increment
  /// drops below tol_conv (tol_conv <= 0 runs all periods). `upper` is finite
  /// only when the projected monodromy is a contraction.
  SeriesResult accumulate(const VectorXd& p, int max_periods, double tol_conv) const;

 private:
  VectorXd project(const VectorXd& q) const;
  double tail_norm_bound(const VectorXd& q) const;  // bound on Σ_{j>=0} ‖q_j‖

  int dim_;
  double remainder_;
  MatrixXd monodromy_;   // X(e + T, e)
  MatrixXd projector_;   // empty means identity
  MatrixXd step_;        // Πᵀ Mᵀ
  SupportKernel period_kernel_;
  SupportKernel head_kernel_;
  int contraction_power_ = 0;  // L with ‖step^L‖ <= contraction_factor_
  double contraction_factor_ = 1.0;
};

struct GramianResult {
  MatrixXd gramian;
  bool controllable = false;
  double condition = std::numeric_limits<double>::infinity();
};

/// W = ∫_0^h X(s,0)⁻¹ B(s) B(s)ᵀ X(s,0)⁻ᵀ ds; controllable when
/// λ_min(W) > tol_rank · λ_max(W).
GramianResult controllability_gramian(const PeriodicSystem& sys, double horizon,
                                      double tol_rank = 1e-10, const QuadratureOptions& quad = {});

/// Support of 𝐑_{kT+τ}(τ, 0) in direction p.
double support_reachable(const PeriodicSystem& sys, double tau, int k, const VectorXd& p,
                         const QuadratureOptions& quad = {});

/// Support of 𝐂_{-kT+τ}(τ, 0) in direction p, computed as a reachable set of
/// the system reversed at μ = 2τ - kT.
double support_controllable(const PeriodicSystem& sys, double tau, int k, const VectorXd& p,
                            const QuadratureOptions& quad = {});

/// An endpoint of 𝐑_{kT+τ}(τ, 0) together with the control producing it.
struct ReachCertificate {
  double phase = 0.0;
  int periods = 0;
  VectorXd point;
  ControlSignal control;
};

ReachCertificate make_certificate(const PeriodicSystem& sys, double tau, int k,
                                  const ControlSignal& control);

/// Checks ⟨p, x + X(kT+τ, τ) y⟩ <= h_{k+ℓ}(p) + tol for every direction.
bool semigroup_check(const PeriodicSystem& sys, const ReachCertificate& x,
                     const ReachCertificate& y, const std::vector<VectorXd>& directions,
                     double tol = 1e-9, const QuadratureOptions& quad = {});

struct FiberOptions {
  double divergence_ratio = 1e3;
  QuadratureOptions quadrature;
};

/// Per-direction support of 𝐑_{k_max T + τ}(0, 0); directions whose last
/// increment exceeds divergence_ratio × the first are flagged unbounded.
ConvexSetApprox reachable_fiber(const PeriodicSystem& sys, double tau, int k_max,
                                const std::vector<VectorXd>& directions,
                                const FiberOptions& options = {});

/// Default direction count: 2 (d=1), 64 (d=2), 256 (d=3), 512 otherwise.
int default_direction_count(int d);

/// Unit directions: ±1 for d=1, uniform angles for d=2, Fibonacci sphere for
/// d=3, seeded Gaussian samples for d>=4.
std::vector<VectorXd> sample_directions(int d, int count, std::uint64_t seed = 0);

}  // namespace pcs
