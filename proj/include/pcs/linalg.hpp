#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Matrix exponential by scaling and squaring with diagonal Padé approximants
/// of degree 3, 5, 7, 9 or 13 (degree chosen from the 1-norm).
MatrixXd expm(const MatrixXd& a);

/// Orthonormal basis of the column span. Columns whose singular value falls
/// below `rank_tol` times the largest are dropped.
MatrixXd orthonormalize(const MatrixXd& columns, double rank_tol = 1e-12);

/// Sines of the largest principal angle between two subspaces given by
/// orthonormal bases of equal dimension. Returns 1 if the dimensions differ.
double max_principal_angle(const MatrixXd& q1, const MatrixXd& q2);

/// Eigenvalues of a real square matrix.
std::vector<std::complex<double>> eigenvalues(const MatrixXd& m);

/// Orthonormal basis of the invariant subspace of `m` belonging to the
/// eigenvalues for which `select` is true. Computed from a real Schur form
/// whose selected diagonal blocks are swapped to the top. Complex pairs are
/// selected jointly (the predicate sees the eigenvalue with positive imaginary
/// part).
MatrixXd invariant_subspace(const MatrixXd& m,
                            const std::function<bool(std::complex<double>)>& select);

/// 2-norm condition number.
double condition_number(const MatrixXd& m);

}  // namespace pcs
