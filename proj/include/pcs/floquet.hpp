#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pcs/periodic_system.hpp"

namespace pcs {

struct FloquetTolerances {
  double group = 1e-9;   // relative agreement of |μ| within a group
  double center = 1e-8;  // ||μ| - 1| <= center classifies as center
};

/// Floquet exponent λ = log|μ| / T shared by a group of multipliers.
struct ExponentGroup {
  double exponent = 0.0;
  int multiplicity = 0;
  std::vector<std::complex<double>> multipliers;
};

enum class SpectralClass { Stable, Center, Unstable };

/// One Floquet (Lyapunov) space L(λ, τ) with an orthonormal basis.
struct SpectralGroup {
  double exponent = 0.0;
  int multiplicity = 0;
  SpectralClass kind = SpectralClass::Stable;
  std::vector<std::complex<double>> multipliers;
  MatrixXd basis;
};

struct FloquetDecomposition {
  double phase = 0.0;
  double period = 0.0;
  MatrixXd monodromy;
  std::vector<SpectralGroup> groups;  // ascending exponent
  MatrixXd stable;                    // E^-
  MatrixXd center;                    // E^0
  MatrixXd unstable;                  // E^+
  MatrixXd center_stable;             // E^{-,0}
  MatrixXd center_unstable;           // E^{+,0}
  FloquetTolerances tolerances;

  int dim() const { return static_cast<int>(monodromy.rows()); }
};

/// X(T + τ, τ).
MatrixXd monodromy(const PeriodicSystem& sys, double tau);

/// Exponents of the monodromy matrix grouped by |μ| (relative tolerance
/// `tol_group`), ascending. Throws NumericalError if M is singular.
std::vector<ExponentGroup> floquet_spectrum(const MatrixXd& m, double period,
                                            double tol_group = 1e-9);

/// Classification of a multiplier modulus relative to the unit circle.
SpectralClass classify_modulus(double modulus, double tol_center);

/// Floquet spaces and stable/center/unstable subspaces at phase τ.
FloquetDecomposition floquet_spaces(const PeriodicSystem& sys, double tau,
                                    const FloquetTolerances& tol = {});

/// Orthonormal basis of X(τ, 0)·span(basis_at_0).
MatrixXd transport_subspace(const PeriodicSystem& sys, const MatrixXd& basis_at_0, double tau);

/// Oblique projectors onto E^-, E^0, E^+ along the other two summands.
struct SpectralProjectors {
  MatrixXd stable;
  MatrixXd center;
  MatrixXd unstable;
  double basis_condition = 1.0;  // cond([E^- E^0 E^+])
};

SpectralProjectors spectral_projectors(const FloquetDecomposition& fd);

}  // namespace pcs
