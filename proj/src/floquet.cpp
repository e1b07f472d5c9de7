#include "pcs/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcs/errors.hpp"
#include "pcs/linalg.hpp"

namespace pcs {

namespace {

constexpr double kDefectGap = 1e-3;

struct Cluster {
  double log_lo;  // log|μ| range covered by the members
  double log_hi;
  std::vector<std::complex<double>> members;
};

std::vector<Cluster> cluster_by_modulus(const MatrixXd& m, double tol_group) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("floquet: monodromy must be a nonempty square matrix");
  }
  if (!(tol_group > 0.0)) throw InvalidArgument("floquet: tol_group must be positive");
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= std::numeric_limits<double>::epsilon() * sv(0)) {
    throw NumericalError("floquet: monodromy matrix is numerically singular");
  }
  Eigen::EigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("floquet: eigenvalue computation failed");
  std::vector<Eigen::Index> order(m.rows());
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (std::abs(ev(a)) != std::abs(ev(b))) return std::abs(ev(a)) < std::abs(ev(b));
    return ev(a).imag() < ev(b).imag();
  });
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  // Sine of the angle between two eigenvectors.
  auto sine = [&](Eigen::Index a, Eigen::Index b) {
    const Eigen::VectorXcd va = vecs.col(a).normalized(), vb = vecs.col(b).normalized();
    return (vb - va.dot(vb) * va).norm();
  };
  std::vector<Cluster> clusters;
  std::vector<Eigen::Index> last;  // index of the largest member of each cluster
  for (const auto i : order) {
    const std::complex<double> mu = ev(i);
    const double lm = std::log(std::abs(mu));
    bool join = false;
    if (!clusters.empty()) {
      // relative agreement of moduli: | |μ1| / |μ2| - 1 | <= tol  ⇔  |log ratio| ≲ tol
      const double gap = lm - clusters.back().log_hi;
      join = gap <= tol_group;
      // A defective multiplier split by rounding: close moduli, nearly parallel eigenvectors.
      if (!join && gap <= kDefectGap) join = sine(last.back(), i) <= std::sqrt(gap);
    }
    if (join) {
      clusters.back().log_hi = lm;
      clusters.back().members.push_back(mu);
      last.back() = i;
    } else {
      clusters.push_back({lm, lm, {mu}});
      last.push_back(i);
    }
  }
  return clusters;
}

double cluster_log(const Cluster& c) {
  double s = 0.0;
  for (const auto& mu : c.members) s += std::log(std::abs(mu));
  return s / static_cast<double>(c.members.size());
}

}  // namespace

MatrixXd monodromy(const PeriodicSystem& sys, double tau) { return sys.monodromy(tau); }

std::vector<ExponentGroup> floquet_spectrum(const MatrixXd& m, double period, double tol_group) {
  if (!(period > 0.0)) throw InvalidArgument("floquet: period must be positive");
  std::vector<ExponentGroup> out;
  for (const auto& c : cluster_by_modulus(m, tol_group)) {
    out.push_back({cluster_log(c) / period, static_cast<int>(c.members.size()), c.members});
  }
  return out;
}

SpectralClass classify_modulus(double modulus, double tol_center) {
  if (modulus < 1.0 - tol_center) return SpectralClass::Stable;
  if (modulus > 1.0 + tol_center) return SpectralClass::Unstable;
  return SpectralClass::Center;
}

FloquetDecomposition floquet_spaces(const PeriodicSystem& sys, double tau,
                                    const FloquetTolerances& tol) {
  if (!(tol.center > 0.0)) throw InvalidArgument("floquet: tol_center must be positive");
  FloquetDecomposition fd;
  fd.phase = sys.phase(tau);
  fd.period = sys.period();
  fd.monodromy = sys.monodromy(fd.phase);
  fd.tolerances = tol;
  const auto d = sys.dim();

  const auto clusters = cluster_by_modulus(fd.monodromy, tol.group);
  std::vector<double> centers;
  for (const auto& c : clusters) {
    const auto kind = classify_modulus(std::abs(c.members.front()), tol.center);
    for (const auto& mu : c.members) {
      if (classify_modulus(std::abs(mu), tol.center) != kind) {
        throw NumericalError(
            "floquet: tolerance conflict, a multiplier group straddles the center band");
      }
    }
    centers.push_back(cluster_log(c));
  }

  // Each Schur block belongs to the cluster with the nearest log-modulus.
  auto nearest = [&](std::complex<double> mu) {
    const double lm = std::log(std::abs(mu));
    std::size_t best = 0;
    for (std::size_t i = 1; i < centers.size(); ++i) {
      if (std::abs(lm - centers[i]) < std::abs(lm - centers[best])) best = i;
    }
    return best;
  };
  auto cls = [&](std::complex<double> mu) {
    return classify_modulus(std::abs(clusters[nearest(mu)].members.front()), tol.center);
  };

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    SpectralGroup g;
    g.exponent = centers[i] / fd.period;
    g.multiplicity = static_cast<int>(clusters[i].members.size());
    g.multipliers = clusters[i].members;
    g.kind = classify_modulus(std::abs(clusters[i].members.front()), tol.center);
    g.basis = invariant_subspace(fd.monodromy, [&](auto mu) { return nearest(mu) == i; });
    if (g.basis.cols() != g.multiplicity) {
      throw NumericalError("floquet: invariant subspace dimension does not match multiplicity");
    }
    fd.groups.push_back(std::move(g));
  }

  auto subspace = [&](auto pred) {
    return invariant_subspace(fd.monodromy, [&](auto mu) { return pred(cls(mu)); });
  };
  fd.stable = subspace([](SpectralClass c) { return c == SpectralClass::Stable; });
  fd.center = subspace([](SpectralClass c) { return c == SpectralClass::Center; });
  fd.unstable = subspace([](SpectralClass c) { return c == SpectralClass::Unstable; });
  fd.center_stable = subspace([](SpectralClass c) { return c != SpectralClass::Unstable; });
  fd.center_unstable = subspace([](SpectralClass c) { return c != SpectralClass::Stable; });
  if (fd.stable.cols() + fd.center.cols() + fd.unstable.cols() != d) {
    throw NumericalError("floquet: spectral subspaces do not span the state space");
  }
  return fd;
}

MatrixXd transport_subspace(const PeriodicSystem& sys, const MatrixXd& basis_at_0, double tau) {
  if (basis_at_0.rows() != sys.dim()) {
    throw InvalidArgument("transport_subspace: basis has wrong row count");
  }
  if (basis_at_0.cols() == 0) return basis_at_0;
  const MatrixXd moved = sys.fundamental(tau, 0.0) * basis_at_0;
  MatrixXd q = orthonormalize(moved, 1e-12);
  if (q.cols() != basis_at_0.cols()) {
    throw NumericalError("transport_subspace: rank loss after transport");
  }
  return q;
}

SpectralProjectors spectral_projectors(const FloquetDecomposition& fd) {
  const auto d = fd.dim();
  const auto ns = fd.stable.cols(), nc = fd.center.cols(), nu = fd.unstable.cols();
  MatrixXd w(d, d);
  w << fd.stable, fd.center, fd.unstable;
  const MatrixXd winv = w.partialPivLu().inverse();
  SpectralProjectors p;
  p.stable = fd.stable * winv.topRows(ns);
  p.center = fd.center * winv.middleRows(ns, nc);
  p.unstable = fd.unstable * winv.bottomRows(nu);
  p.basis_condition = condition_number(w);
  return p;
}

}  // namespace pcs
