#include "pcs/reachable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "pcs/errors.hpp"
#include "pcs/linalg.hpp"

namespace pcs {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct Piece {
  double start;
  double end;
  const CoefficientSegment* segment;
};

// Splits [a, b] at coefficient switches.
std::vector<Piece> pieces_of(const PeriodicSystem& sys, double a, double b) {
  std::vector<double> cuts = sys.breakpoints(a, b);
  cuts.insert(cuts.begin(), a);
  cuts.push_back(b);
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    out.push_back({cuts[i], cuts[i + 1], &sys.segments()[sys.segment_index(mid)]});
  }
  return out;
}

int panels_for(const Piece& p, const QuadratureOptions& quad) {
  const double seg_len = p.segment->end - p.segment->start;
  const double frac = (p.end - p.start) / seg_len;
  return std::max(1, static_cast<int>(std::ceil(quad.substeps * frac - 1e-9)));
}

}  // namespace

// ------------------------------------------------------------- ConvexSetApprox

void ConvexSetApprox::validate(double tol) const {
  if (support.size() != directions.size() || unbounded.size() != directions.size()) {
    throw NumericalError("convex set: directions, supports and flags differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(directions[i].norm() - 1.0) > 1e-12) {
      throw NumericalError("convex set: direction " + std::to_string(i) + " is not unit norm");
    }
    if (!unbounded[i] && !std::isfinite(support[i])) {
      throw NumericalError("convex set: non-finite support in a bounded direction");
    }
  }
  auto find = [&](const VectorXd& v) -> long {
    for (std::size_t j = 0; j < size(); ++j) {
      if ((directions[j] - v).cwiseAbs().maxCoeff() <= 1e-12) return static_cast<long>(j);
    }
    return -1;
  };
  if (symmetric) {
    for (std::size_t i = 0; i < size(); ++i) {
      const long j = find(-directions[i]);
      if (j < 0 || unbounded[i] || unbounded[j]) continue;
      if (std::abs(support[i] - support[j]) > tol) {
        throw NumericalError("convex set: symmetry violated");
      }
    }
  }
  const std::size_t spot = std::min<std::size_t>(size(), 64);
  for (std::size_t i = 0; i < spot; ++i) {
    for (std::size_t j = i + 1; j < spot; ++j) {
      if (unbounded[i] || unbounded[j]) continue;
      const VectorXd sum = directions[i] + directions[j];
      const double n = sum.norm();
      if (n < 1e-6) continue;
      const long k = find(sum / n);
      if (k < 0 || unbounded[k]) continue;
      if (n * support[k] > support[i] + support[j] + tol) {
        throw NumericalError("convex set: support function is not subadditive");
      }
    }
  }
}

AutonomizedPoint autonomized_point(const PeriodicSystem& sys, double t, const VectorXd& x) {
  return {sys.phase(t), x};
}

// --------------------------------------------------------------- SupportKernel

SupportKernel::SupportKernel(const PeriodicSystem& sys, double a, double b,
                             const QuadratureOptions& quad)
    : range_(sys.control_range()), dim_(sys.dim()) {
  if (quad.substeps < 1) throw InvalidArgument("quadrature: substeps must be positive");
  if (b < a) throw InvalidArgument("support kernel: interval reversed");
  const auto& variant = range_.variant();
  switching_ = !std::holds_alternative<ControlRange::Ball>(variant) || range_.dimension() == 1;
  const auto d = sys.dim();
  const double r_u = range_.max_norm();
  auto parts = pieces_of(sys, a, b);
  MatrixXd to_end = MatrixXd::Identity(d, d);  // X(b, piece end)
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    const auto& seg = *it->segment;
    const int panels = panels_for(*it, quad);
    const double h = (it->end - it->start) / panels;
    piece_coeffs_.emplace_back(seg.a.transpose(), seg.b.transpose());
    std::array<MatrixXd, 8> node_flow;  // exp(A · (panel end - node))
    for (std::size_t i = 0; i < 8; ++i) node_flow[i] = expm(seg.a * (0.5 * h * (1.0 - kGaussNodes[i])));
    const MatrixXd panel_flow = expm(seg.a * h);
    MatrixXd panel_end = to_end;
    for (int j = panels - 1; j >= 0; --j) {
      Panel panel;
      panel.first = gains_.size();
      panel.piece = piece_coeffs_.size() - 1;
      panel.length = h;
      panel.end_map = panel_end.transpose();
      panel.end_gain = seg.b.transpose() * panel.end_map;
      panel.start_gain = (panel_end * panel_flow * seg.b).transpose();
      panels_.push_back(std::move(panel));
      for (std::size_t i = 0; i < 8; ++i) {
        MatrixXd gain = (panel_end * node_flow[i] * seg.b).transpose();
        const double w = 0.5 * h * kGaussWeights[i];
        bound_ += w * r_u * gain.norm();
        weights_.push_back(w);
        gains_.push_back(std::move(gain));
      }
      panel_end = panel_end * panel_flow;
    }
    to_end = panel_end;
  }
}

MatrixXd SupportKernel::gain_at(const Panel& panel, double sigma) const {
  const auto& [at, bt] = piece_coeffs_[panel.piece];
  return bt * expm(at * sigma) * panel.end_map;
}

double SupportKernel::refine(const Panel& panel, const VectorXd& q, double lo, double hi, int depth,
                             VectorXd* point) const {
  // Samples ordered by sigma = distance to the panel end.
  std::array<double, 10> sigma;
  std::array<MatrixXd, 10> gain;
  sigma[0] = lo;
  sigma[9] = hi;
  for (std::size_t i = 0; i < 8; ++i) sigma[8 - i] = lo + 0.5 * (hi - lo) * (1.0 - kGaussNodes[i]);
  std::array<VectorXd, 10> u;
  for (std::size_t i = 0; i < 10; ++i) {
    gain[i] = gain_at(panel, sigma[i]);
    u[i] = range_.argmax(gain[i] * q);
  }
  if (depth > 0) {
    for (std::size_t i = 0; i + 1 < 10; ++i) {
      if (u[i] == u[i + 1]) continue;
      const VectorXd w = u[i] - u[i + 1];
      auto g = [&](double s) { return (gain_at(panel, s) * q).dot(w); };
      double x0 = sigma[i], x1 = sigma[i + 1];
      double g0 = (gain[i] * q).dot(w), g1 = (gain[i + 1] * q).dot(w);
      // Illinois iteration; g0 >= 0 >= g1 by optimality of u[i] and u[i + 1].
      for (int it = 0; it < 60 && x1 - x0 > 1e-14 * std::max(1.0, hi); ++it) {
        double x = (g0 == g1) ? 0.5 * (x0 + x1) : x1 - g1 * (x1 - x0) / (g1 - g0);
        if (!(x > x0 && x < x1)) x = 0.5 * (x0 + x1);
        const double gx = g(x);
        if ((gx > 0.0) == (g0 > 0.0)) {
          x0 = x;
          g0 = gx;
          g1 *= 0.5;
        } else {
          x1 = x;
          g1 = gx;
          g0 *= 0.5;
        }
      }
      const double root = 0.5 * (x0 + x1);
      return refine(panel, q, lo, root, depth - 1, point) + refine(panel, q, root, hi, depth - 1, point);
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double w = 0.5 * (hi - lo) * kGaussWeights[i];
    const MatrixXd& gi = gain[8 - i];
    const VectorXd c = gi * q;
    s += w * range_.support(c);
    if (point) *point += w * gi.transpose() * u[8 - i];
  }
  return s;
}

double SupportKernel::panel_integral(const Panel& panel, const VectorXd& q, VectorXd* point) const {
  bool smooth = !switching_;
  if (!smooth) {
    const VectorXd u0 = range_.argmax(panel.end_gain * q);
    smooth = range_.argmax(panel.start_gain * q) == u0;
    for (std::size_t i = 0; smooth && i < 8; ++i) smooth = range_.argmax(gains_[panel.first + i] * q) == u0;
  }
  if (!smooth) return refine(panel, q, 0.0, panel.length, 12, point);
  double s = 0.0;
  for (std::size_t i = panel.first; i < panel.first + 8; ++i) {
    const VectorXd c = gains_[i] * q;
    s += weights_[i] * range_.support(c);
    if (point) *point += weights_[i] * gains_[i].transpose() * range_.argmax(c);
  }
  return s;
}

double SupportKernel::evaluate(const VectorXd& q) const {
  double s = 0.0;
  for (const auto& panel : panels_) s += panel_integral(panel, q, nullptr);
  return s;
}

VectorXd SupportKernel::support_point(const VectorXd& q) const {
  VectorXd y = VectorXd::Zero(dim_);
  for (const auto& panel : panels_) panel_integral(panel, q, &y);
  return y;
}

// --------------------------------------------------------------- SupportSeries

SupportSeries::SupportSeries(const PeriodicSystem& sys, double start_phase, double end_phase,
                             const QuadratureOptions& quad, MatrixXd projector)
    : dim_(sys.dim()),
      remainder_(sys.phase(end_phase - start_phase)),
      monodromy_(sys.fundamental(sys.phase(start_phase) + remainder_ + sys.period(),
                                 sys.phase(start_phase) + remainder_)),
      projector_(std::move(projector)),
      period_kernel_(sys, sys.phase(start_phase) + remainder_,
                     sys.phase(start_phase) + remainder_ + sys.period(), quad),
      head_kernel_(sys, sys.phase(start_phase), sys.phase(start_phase) + remainder_, quad) {
  if (projector_.size() != 0 && (projector_.rows() != dim_ || projector_.cols() != dim_)) {
    throw InvalidArgument("support series: projector has wrong shape");
  }
  step_ = projector_.size() != 0 ? MatrixXd(projector_.transpose() * monodromy_.transpose())
                                 : MatrixXd(monodromy_.transpose());
  MatrixXd power = MatrixXd::Identity(dim_, dim_);
  const int max_power = 64 * std::max(1, dim_);
  for (int l = 1; l <= max_power; ++l) {
    power = step_ * power;
    Eigen::JacobiSVD<MatrixXd> svd(power);
    const double n = svd.singularValues()(0);
    if (n <= 0.5) {
      contraction_power_ = l;
      contraction_factor_ = n;
      break;
    }
    if (!std::isfinite(n) || n > 1e150) break;
  }
}

VectorXd SupportSeries::project(const VectorXd& q) const {
  if (q.size() != dim_) throw InvalidArgument("support series: direction has wrong dimension");
  if (!q.allFinite()) throw InvalidArgument("support series: non-finite direction");
  return projector_.size() != 0 ? VectorXd(projector_.transpose() * q) : q;
}

double SupportSeries::value(const VectorXd& p, int periods) const {
  if (periods < 0) throw InvalidArgument("support series: negative period count");
  VectorXd q = project(p);
  double sum = 0.0;
  for (int j = 0; j < periods; ++j) {
    sum += period_kernel_.evaluate(q);
    q = step_ * q;
  }
  return sum + head_kernel_.evaluate(q);
}

VectorXd SupportSeries::support_point(const VectorXd& p, int periods) const {
  VectorXd q = project(p);
  MatrixXd transfer = projector_.size() != 0 ? projector_ : MatrixXd::Identity(dim_, dim_);
  const MatrixXd advance = projector_.size() != 0 ? MatrixXd(projector_ * monodromy_) : monodromy_;
  VectorXd y = VectorXd::Zero(dim_);
  for (int j = 0; j < periods; ++j) {
    y += transfer * period_kernel_.support_point(q);
    q = step_ * q;
    transfer = advance * transfer;
  }
  return y + transfer * head_kernel_.support_point(q);
}

double SupportSeries::tail_norm_bound(const VectorXd& q) const {
  if (contraction_power_ == 0) return std::numeric_limits<double>::infinity();
  double block = 0.0;
  VectorXd v = q;
  for (int i = 0; i < contraction_power_; ++i) {
    block += v.norm();
    v = step_ * v;
  }
  return block / (1.0 - contraction_factor_);
}

SeriesResult SupportSeries::accumulate(const VectorXd& p, int max_periods, double tol_conv) const {
  if (max_periods < 0) throw InvalidArgument("support series: negative period count");
  SeriesResult r;
  VectorXd q = project(p);
  double sum = 0.0;
  r.values.push_back(head_kernel_.evaluate(q));
  int small_steps = 0;
  for (int n = 1; n <= max_periods; ++n) {
    sum += period_kernel_.evaluate(q);
    q = step_ * q;
    r.values.push_back(sum + head_kernel_.evaluate(q));
    r.periods = n;
    const double inc = r.values[n] - r.values[n - 1];
    small_steps = (tol_conv > 0.0 && std::abs(inc) < tol_conv) ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      r.converged = true;
      break;
    }
  }
  r.lower = r.values.back();
  r.upper = sum + period_kernel_.bound() * tail_norm_bound(q);
  if (r.values.size() >= 3) {
    const double first = r.values[1] - r.values[0];
    const double last = r.values.back() - r.values[r.values.size() - 2];
    r.diverging = last > 1e-12 && last > 1e3 * std::max(first, 0.0);
  }
  return r;
}

// ------------------------------------------------------------------ operations

GramianResult controllability_gramian(const PeriodicSystem& sys, double horizon, double tol_rank,
                                      const QuadratureOptions& quad) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("controllability_gramian: horizon must be positive");
  }
  const auto d = sys.dim();
  GramianResult out;
  out.gramian = MatrixXd::Zero(d, d);
  MatrixXd back = MatrixXd::Identity(d, d);  // X(0, piece start)
  for (const auto& piece : pieces_of(sys, 0.0, horizon)) {
    const auto& seg = *piece.segment;
    const int panels = panels_for(piece, quad);
    const double h = (piece.end - piece.start) / panels;
    for (int j = 0; j < panels; ++j) {
      for (std::size_t i = 0; i < 8; ++i) {
        const double offset = h * j + 0.5 * h * (1.0 + kGaussNodes[i]);
        const MatrixXd g = back * expm(-seg.a * offset) * seg.b;
        out.gramian += 0.5 * h * kGaussWeights[i] * g * g.transpose();
      }
    }
    back = back * expm(-seg.a * (piece.end - piece.start));
  }
  out.gramian = 0.5 * (out.gramian + out.gramian.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.gramian, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(d - 1);
  out.controllable = hi > 0.0 && lo > tol_rank * hi;
  out.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  return out;
}

double support_reachable(const PeriodicSystem& sys, double tau, int k, const VectorXd& p,
                         const QuadratureOptions& quad) {
  if (p.norm() == 0.0) throw InvalidArgument("support_reachable: zero direction");
  if (k < 0) throw InvalidArgument("support_reachable: negative period count");
  return SupportSeries(sys, tau, tau, quad).value(p, k);
}

double support_controllable(const PeriodicSystem& sys, double tau, int k, const VectorXd& p,
                            const QuadratureOptions& quad) {
  if (p.norm() == 0.0) throw InvalidArgument("support_controllable: zero direction");
  if (k < 0) throw InvalidArgument("support_controllable: negative period count");
  const double start = tau - k * sys.period();
  const PeriodicSystem reversed = time_reverse(sys, start + tau);
  return SupportSeries(reversed, start, tau, quad).value(p, k);
}

ReachCertificate make_certificate(const PeriodicSystem& sys, double tau, int k,
                                  const ControlSignal& control) {
  if (control.empty()) throw InvalidArgument("certificate: missing control");
  ReachCertificate c;
  c.phase = sys.phase(tau);
  c.periods = k;
  c.control = control;
  c.point = solve(sys, c.phase + k * sys.period(), c.phase, VectorXd::Zero(sys.dim()), control);
  return c;
}

bool semigroup_check(const PeriodicSystem& sys, const ReachCertificate& x,
                     const ReachCertificate& y, const std::vector<VectorXd>& directions,
                     double tol, const QuadratureOptions& quad) {
  for (const auto* c : {&x, &y}) {
    if (c->control.empty() || c->point.size() != sys.dim()) {
      throw InvalidArgument("semigroup_check: missing certificate");
    }
    const VectorXd replay = solve(sys, c->phase + c->periods * sys.period(), c->phase,
                                  VectorXd::Zero(sys.dim()), c->control);
    if ((replay - c->point).norm() > 1e-8 * (1.0 + c->point.norm())) {
      throw InvalidArgument("semigroup_check: certificate does not reproduce its endpoint");
    }
  }
  if (std::abs(x.phase - y.phase) > 1e-12 * sys.period()) {
    throw InvalidArgument("semigroup_check: certificates at different phases");
  }
  const double tau = x.phase;
  const VectorXd z = x.point + sys.fundamental(x.periods * sys.period() + tau, tau) * y.point;
  const SupportSeries series(sys, tau, tau, quad);
  for (const auto& p : directions) {
    if (p.dot(z) > series.value(p, x.periods + y.periods) + tol) return false;
  }
  return true;
}

ConvexSetApprox reachable_fiber(const PeriodicSystem& sys, double tau, int k_max,
                                const std::vector<VectorXd>& directions,
                                const FiberOptions& options) {
  if (k_max < 0) throw InvalidArgument("reachable_fiber: negative k_max");
  const SupportSeries series(sys, 0.0, tau, options.quadrature);
  ConvexSetApprox out;
  out.symmetric = sys.control_range().is_symmetric();
  for (const auto& p : directions) {
    const SeriesResult r = series.accumulate(p, k_max, 0.0);
    const double first = r.values.size() > 1 ? r.values[1] - r.values[0] : 0.0;
    const double last =
        r.values.size() > 1 ? r.values.back() - r.values[r.values.size() - 2] : 0.0;
    out.directions.push_back(p);
    out.support.push_back(*std::max_element(r.values.begin(), r.values.end()));
    out.unbounded.push_back(r.values.size() > 2 && last > 1e-12 &&
                            last > options.divergence_ratio * std::max(first, 0.0));
  }
  return out;
}

int default_direction_count(int d) {
  switch (d) {
    case 1: return 2;
    case 2: return 64;
    case 3: return 256;
    default: return 512;
  }
}

std::vector<VectorXd> sample_directions(int d, int count, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("sample_directions: dimension must be positive");
  std::vector<VectorXd> out;
  if (d == 1) {
    out.push_back(VectorXd::Constant(1, 1.0));
    out.push_back(VectorXd::Constant(1, -1.0));
    return out;
  }
  if (count < 1) throw InvalidArgument("sample_directions: count must be positive");
  out.reserve(count);
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double angle = 2.0 * std::numbers::pi * i / count;
      VectorXd v(2);
      v << std::cos(angle), std::sin(angle);
      out.push_back(v);
    }
  } else if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      VectorXd v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      out.push_back(v.normalized());
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    while (static_cast<int>(out.size()) < count) {
      VectorXd v(d);
      for (int j = 0; j < d; ++j) v(j) = normal(rng);
      if (v.norm() > 1e-8) out.push_back(v.normalized());
    }
  }
  return out;
}

}  // namespace pcs
