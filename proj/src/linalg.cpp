#include "pcs/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <lapacke.h>

#include "pcs/errors.hpp"

namespace pcs {

namespace {

constexpr std::array<double, 4> kPade3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> kPade5 = {30240., 15120., 3360., 420., 30., 1.};
constexpr std::array<double, 8> kPade7 = {17297280., 8648640., 1995840., 277200.,
                                          25200.,    1512.,    56.,      1.};
constexpr std::array<double, 10> kPade9 = {17643225600., 8821612800., 2075673600.,
                                           302702400.,   30270240.,   2162160.,
                                           110880.,      3960.,       90.,
                                           1.};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
    129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
    1323241920.,        40840800.,          960960.,           16380.,
    182.,               1.};

// Largest 1-norms for which the degree-m Padé approximant is accurate to unit
// roundoff (Higham 2005).
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
MatrixXd pade_low(const MatrixXd& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd power = id;
  MatrixXd u_inner = MatrixXd::Zero(n, n);
  MatrixXd v = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const MatrixXd u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

MatrixXd pade13(const MatrixXd& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

std::complex<double> block_eigenvalue(const MatrixXd& t, Eigen::Index k, bool pair) {
  if (!pair) return {t(k, k), 0.0};
  const double a = t(k, k), b = t(k, k + 1), c = t(k + 1, k), d = t(k + 1, k + 1);
  const double half_trace = 0.5 * (a + d);
  const double disc = 0.25 * (a - d) * (a - d) + b * c;
  if (disc >= 0.0) return {half_trace + std::sqrt(disc), 0.0};
  return {half_trace, std::sqrt(-disc)};
}

}  // namespace

MatrixXd expm(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm: matrix must be square");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw InvalidArgument("expm: non-finite entries");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kTheta3) return pade_low(a, kPade3);
  if (norm1 <= kTheta5) return pade_low(a, kPade5);
  if (norm1 <= kTheta7) return pade_low(a, kPade7);
  if (norm1 <= kTheta9) return pade_low(a, kPade9);
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  MatrixXd r = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

MatrixXd orthonormalize(const MatrixXd& columns, double rank_tol) {
  if (columns.cols() == 0) return MatrixXd(columns.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const double cutoff = rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

double max_principal_angle(const MatrixXd& q1, const MatrixXd& q2) {
  if (q1.cols() != q2.cols()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  const MatrixXd residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<MatrixXd> svd(residual);
  return std::min(1.0, svd.singularValues()(0));
}

std::vector<std::complex<double>> eigenvalues(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue iteration failed");
  std::vector<std::complex<double>> out(solver.eigenvalues().begin(),
                                        solver.eigenvalues().end());
  return out;
}

MatrixXd invariant_subspace(const MatrixXd& m,
                            const std::function<bool(std::complex<double>)>& select) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) throw InvalidArgument("invariant_subspace: matrix must be square");
  if (n == 0) return MatrixXd(0, 0);
  MatrixXd t = m;  // column-major, as LAPACK expects
  MatrixXd q(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, t.data(), n, &sdim,
                                  wr.data(), wi.data(), q.data(), n);
  if (info != 0) throw NumericalError("real Schur decomposition failed");

  auto is_pair = [&](Eigen::Index k) { return k + 1 < n && t(k + 1, k) != 0.0; };
  Eigen::Index placed = 0;
  while (true) {
    Eigen::Index found = -1;
    for (Eigen::Index k = placed; k < n;) {
      const bool pair = is_pair(k);
      if (select(block_eigenvalue(t, k, pair))) {
        found = k;
        break;
      }
      k += pair ? 2 : 1;
    }
    if (found < 0) break;
    if (found != placed) {
      lapack_int ifst = static_cast<lapack_int>(found + 1);
      lapack_int ilst = static_cast<lapack_int>(placed + 1);
      info = LAPACKE_dtrexc(LAPACK_COL_MAJOR, 'V', n, t.data(), n, q.data(), n, &ifst, &ilst);
      if (info != 0) {
        throw NumericalError("Schur block swap rejected: eigenvalues too close to separate");
      }
    }
    placed += is_pair(placed) ? 2 : 1;
  }
  return q.leftCols(placed);
}

double condition_number(const MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

}  // namespace pcs
