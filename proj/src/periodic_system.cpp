#include "pcs/periodic_system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pcs/errors.hpp"
#include "pcs/linalg.hpp"

namespace pcs {

namespace {

constexpr double kBoundaryTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Squared distance from `u` to the convex hull of `vertices` (Gilbert's
// algorithm).
double hull_distance(const std::vector<VectorXd>& vertices, const VectorXd& u) {
  VectorXd x = vertices.front();
  for (int iter = 0; iter < 10000; ++iter) {
    const VectorXd dir = u - x;
    if (dir.squaredNorm() == 0.0) return 0.0;
    const VectorXd* best = &vertices.front();
    double best_val = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) {
      const double val = dir.dot(v);
      if (val > best_val) {
        best_val = val;
        best = &v;
      }
    }
    const VectorXd step = *best - x;
    const double gap = dir.dot(step);
    if (gap <= 1e-14 * (1.0 + dir.squaredNorm())) break;
    const double lambda = std::clamp(gap / step.squaredNorm(), 0.0, 1.0);
    x += lambda * step;
  }
  return (u - x).norm();
}

}  // namespace

// ---------------------------------------------------------------- ControlRange

ControlRange::ControlRange(Box box) : range_(std::move(box)) {
  const auto& b = std::get<Box>(range_);
  if (b.lower.size() == 0 || b.lower.size() != b.upper.size()) {
    throw InvalidArgument("box control range: bounds must be nonempty and of equal length");
  }
  if (!b.lower.allFinite() || !b.upper.allFinite() || (b.lower.array() > b.upper.array()).any()) {
    throw InvalidArgument("box control range: need finite lower <= upper");
  }
}

ControlRange::ControlRange(Polytope polytope) : range_(std::move(polytope)) {
  const auto& p = std::get<Polytope>(range_);
  if (p.vertices.empty()) throw InvalidArgument("polytope control range: no vertices");
  for (const auto& v : p.vertices) {
    if (v.size() != p.vertices.front().size() || v.size() == 0 || !v.allFinite()) {
      throw InvalidArgument("polytope control range: vertices must be finite and same length");
    }
  }
}

ControlRange::ControlRange(Ball ball) : range_(ball) {
  if (ball.dimension < 1 || !(ball.radius > 0.0) || !std::isfinite(ball.radius)) {
    throw InvalidArgument("ball control range: need dimension >= 1 and finite radius > 0");
  }
}

ControlRange ControlRange::symmetric_box(int m, double r) {
  return ControlRange(Box{VectorXd::Constant(m, -r), VectorXd::Constant(m, r)});
}

int ControlRange::dimension() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return static_cast<int>(b.lower.size()); },
                        [](const Polytope& p) {
                          return static_cast<int>(p.vertices.front().size());
                        },
                        [](const Ball& b) { return b.dimension; },
                    },
                    range_);
}

double ControlRange::support(const VectorXd& c) const {
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          double s = 0.0;
                          for (Eigen::Index i = 0; i < c.size(); ++i) {
                            s += c(i) > 0.0 ? c(i) * b.upper(i) : c(i) * b.lower(i);
                          }
                          return s;
                        },
                        [&](const Polytope& p) {
                          double s = -std::numeric_limits<double>::infinity();
                          for (const auto& v : p.vertices) s = std::max(s, c.dot(v));
                          return s;
                        },
                        [&](const Ball& b) { return b.radius * c.norm(); },
                    },
                    range_);
}

VectorXd ControlRange::argmax(const VectorXd& c) const {
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          VectorXd u(c.size());
                          for (Eigen::Index i = 0; i < c.size(); ++i) {
                            u(i) = c(i) > 0.0 ? b.upper(i) : (c(i) < 0.0 ? b.lower(i) : 0.0);
                          }
                          // zero weight: any value is optimal; pick one inside U
                          for (Eigen::Index i = 0; i < c.size(); ++i) {
                            if (c(i) == 0.0) u(i) = std::clamp(0.0, b.lower(i), b.upper(i));
                          }
                          return u;
                        },
                        [&](const Polytope& p) {
                          const VectorXd* best = &p.vertices.front();
                          double s = -std::numeric_limits<double>::infinity();
                          for (const auto& v : p.vertices) {
                            if (c.dot(v) > s) {
                              s = c.dot(v);
                              best = &v;
                            }
                          }
                          return *best;
                        },
                        [&](const Ball& b) -> VectorXd {
                          const double n = c.norm();
                          if (n == 0.0) return VectorXd::Zero(b.dimension);
                          return b.radius / n * c;
                        },
                    },
                    range_);
}

bool ControlRange::contains(const VectorXd& u, double tol) const {
  if (u.size() != dimension()) return false;
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return (u.array() >= b.lower.array() - tol).all() &&
                                 (u.array() <= b.upper.array() + tol).all();
                        },
                        [&](const Polytope& p) { return hull_distance(p.vertices, u) <= tol; },
                        [&](const Ball& b) { return u.norm() <= b.radius + tol; },
                    },
                    range_);
}

double ControlRange::max_norm() const {
  return std::visit(Overloaded{
                        [](const Box& b) {
                          return b.lower.cwiseAbs().cwiseMax(b.upper.cwiseAbs()).norm();
                        },
                        [](const Polytope& p) {
                          double r = 0.0;
                          for (const auto& v : p.vertices) r = std::max(r, v.norm());
                          return r;
                        },
                        [](const Ball& b) { return b.radius; },
                    },
                    range_);
}

bool ControlRange::is_neighborhood_of_origin() const {
  return std::visit(
      Overloaded{
          [](const Box& b) {
            return (b.lower.array() < 0.0).all() && (b.upper.array() > 0.0).all();
          },
          [this](const Polytope& p) {
            const auto m = static_cast<int>(p.vertices.front().size());
            std::mt19937_64 rng(0x5eed);
            std::normal_distribution<double> normal;
            for (int i = 0; i < 2 * m + 512; ++i) {
              VectorXd c = VectorXd::Zero(m);
              if (i < 2 * m) {
                c(i / 2) = (i % 2 == 0) ? 1.0 : -1.0;
              } else {
                for (int j = 0; j < m; ++j) c(j) = normal(rng);
              }
              if (support(c) <= 1e-12 * c.norm()) return false;
            }
            return true;
          },
          [](const Ball&) { return true; },
      },
      range_);
}

bool ControlRange::is_symmetric() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return (b.lower + b.upper).cwiseAbs().maxCoeff() <= 1e-15; },
                        [](const Polytope& p) {
                          for (const auto& v : p.vertices) {
                            bool mirrored = false;
                            for (const auto& w : p.vertices) {
                              if ((v + w).cwiseAbs().maxCoeff() <= 1e-15) mirrored = true;
                            }
                            if (!mirrored) return false;
                          }
                          return true;
                        },
                        [](const Ball&) { return true; },
                    },
                    range_);
}

// --------------------------------------------------------------- ControlSignal

ControlSignal::ControlSignal(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) return;
  const auto m = pieces_.front().value.size();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.end > p.start) || !std::isfinite(p.start) || !std::isfinite(p.end)) {
      throw InvalidArgument("control signal: piece " + std::to_string(i) + " has empty interval");
    }
    if (p.value.size() != m || !p.value.allFinite()) {
      throw InvalidArgument("control signal: inconsistent or non-finite values");
    }
    if (i > 0) {
      const double gap = p.start - pieces_[i - 1].end;
      if (std::abs(gap) > kBoundaryTol * std::max(1.0, std::abs(p.start))) {
        throw InvalidArgument("control signal: pieces must partition the horizon");
      }
      pieces_[i].start = pieces_[i - 1].end;
    }
  }
}

ControlSignal ControlSignal::constant(double start, double end, const VectorXd& value) {
  return ControlSignal({Piece{start, end, value}});
}

double ControlSignal::start() const {
  if (pieces_.empty()) throw DomainError("control signal is empty");
  return pieces_.front().start;
}

double ControlSignal::end() const {
  if (pieces_.empty()) throw DomainError("control signal is empty");
  return pieces_.back().end;
}

int ControlSignal::dimension() const {
  return pieces_.empty() ? 0 : static_cast<int>(pieces_.front().value.size());
}

const VectorXd& ControlSignal::value(double t) const {
  if (pieces_.empty()) throw DomainError("control signal is empty");
  const double tol = kBoundaryTol * std::max(1.0, std::abs(t));
  if (t < start() - tol || t > end() + tol) {
    throw DomainError("control signal evaluated outside its horizon");
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double x, const Piece& p) { return x < p.start; });
  if (it == pieces_.begin()) return pieces_.front().value;
  return std::prev(it)->value;
}

void ControlSignal::check_in(const ControlRange& range) const {
  for (const auto& p : pieces_) {
    if (!range.contains(p.value, 1e-12)) {
      throw InvalidArgument("control signal: value outside the control range");
    }
  }
}

ControlSignal ControlSignal::shifted(double shift) const {
  std::vector<Piece> out = pieces_;
  for (auto& p : out) {
    p.start -= shift;
    p.end -= shift;
  }
  return ControlSignal(std::move(out));
}

// -------------------------------------------------------------- PeriodicSystem

PeriodicSystem::PeriodicSystem(double period, std::vector<CoefficientSegment> segments,
                               ControlRange range)
    : period_(period), segments_(std::move(segments)), range_(std::move(range)) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw InvalidArgument("periodic system: period must be positive and finite");
  }
  if (segments_.empty()) throw InvalidArgument("periodic system: no coefficient segments");
  const auto d = segments_.front().a.rows();
  const auto m = segments_.front().b.cols();
  if (d < 1 || m < 1) throw InvalidArgument("periodic system: empty coefficient matrices");
  if (m != range_.dimension()) {
    throw InvalidArgument("periodic system: control range dimension does not match B");
  }
  const double tol = kBoundaryTol * std::max(1.0, period_);
  if (std::abs(segments_.front().start) > tol) {
    throw InvalidArgument("periodic system: segments must start at 0");
  }
  segments_.front().start = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    if (s.a.rows() != d || s.a.cols() != d || s.b.rows() != d || s.b.cols() != m) {
      throw InvalidArgument("periodic system: segment " + std::to_string(i) +
                            " has inconsistent matrix shapes");
    }
    if (!s.a.allFinite() || !s.b.allFinite()) {
      throw InvalidArgument("periodic system: non-finite coefficient entries");
    }
    if (i > 0) {
      if (std::abs(s.start - segments_[i - 1].end) > tol) {
        throw InvalidArgument("periodic system: segments must partition [0, T) without gaps");
      }
      s.start = segments_[i - 1].end;
    }
    if (!(s.end > s.start)) {
      throw InvalidArgument("periodic system: segment endpoints must be strictly increasing");
    }
  }
  if (std::abs(segments_.back().end - period_) > tol) {
    throw InvalidArgument("periodic system: segments must end at the period");
  }
  segments_.back().end = period_;
  segment_flow_.reserve(segments_.size());
  for (const auto& s : segments_) segment_flow_.push_back(expm(s.a * (s.end - s.start)));
}

PeriodicSystem PeriodicSystem::constant(const MatrixXd& a, const MatrixXd& b, double period,
                                        ControlRange range) {
  return PeriodicSystem(period, {CoefficientSegment{0.0, period, a, b}}, std::move(range));
}

double PeriodicSystem::phase(double t) const {
  double r = std::fmod(t, period_);
  if (r < 0.0) r += period_;
  if (r >= period_) r = 0.0;
  return r;
}

std::size_t PeriodicSystem::segment_index(double t) const {
  const double p = phase(t);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), p,
                             [](double x, const CoefficientSegment& s) { return x < s.start; });
  return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

std::pair<const MatrixXd&, const MatrixXd&> PeriodicSystem::coefficients(double t) const {
  const auto& s = segments_[segment_index(t)];
  return {s.a, s.b};
}

std::vector<double> PeriodicSystem::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  const double first_period = std::floor(lo / period_);
  for (double k = first_period;; k += 1.0) {
    const double base = k * period_;
    if (base > hi) break;
    for (const auto& s : segments_) {
      const double t = base + s.start;
      if (t > lo && t < hi) out.push_back(t);
    }
  }
  return out;
}

MatrixXd PeriodicSystem::forward(double t, double s) const {
  const auto d = dim();
  MatrixXd x = MatrixXd::Identity(d, d);
  if (t <= s) return x;
  double k = std::floor(s / period_);
  std::size_t idx = segment_index(s);
  // guard against s sitting a rounding error past the computed segment
  if (k * period_ + segments_[idx].end <= s) {
    if (++idx == segments_.size()) {
      idx = 0;
      k += 1.0;
    }
  }
  double current = s;

  // Whole periods are taken from the monodromy at phase(s).
  const double span = t - s;
  const auto full = static_cast<long long>(std::floor(span / period_ * (1.0 + 1e-15)));
  if (full >= 2) {
    MatrixXd base = forward(s + period_, s);
    MatrixXd power = MatrixXd::Identity(d, d);
    long long n = full;
    while (n > 0) {
      if (n & 1) power = base * power;
      base = base * base;
      n >>= 1;
    }
    x = power;
    current = s + static_cast<double>(full) * period_;
    k += static_cast<double>(full);
  }

  while (current < t) {
    const auto& seg = segments_[idx];
    const double seg_end = k * period_ + seg.end;
    const double seg_start = k * period_ + seg.start;
    const double stop = std::min(seg_end, t);
    const double h = stop - current;
    if (h > 0.0) {
      const bool whole = current == seg_start && stop == seg_end;
      x = (whole ? segment_flow_[idx] : expm(seg.a * h)) * x;
    }
    current = stop;
    if (current >= seg_end) {
      if (++idx == segments_.size()) {
        idx = 0;
        k += 1.0;
      }
    }
  }
  return x;
}

MatrixXd PeriodicSystem::fundamental(double t, double s) const {
  if (!std::isfinite(t) || !std::isfinite(s)) {
    throw InvalidArgument("fundamental matrix: times must be finite");
  }
  if (t >= s) return forward(t, s);
  return forward(s, t).partialPivLu().inverse();
}

MatrixXd PeriodicSystem::monodromy(double tau) const {
  const double p = phase(tau);
  return forward(p + period_, p);
}

// ----------------------------------------------------------------- operations

std::pair<MatrixXd, MatrixXd> eval_coeffs(const PeriodicSystem& sys, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("eval_coeffs: time must be finite");
  auto [a, b] = sys.coefficients(t);
  return {a, b};
}

FundamentalMatrix fundamental_matrix(const PeriodicSystem& sys, double t, double s) {
  return {t, s, sys.fundamental(t, s)};
}

VectorXd solve(const PeriodicSystem& sys, double t, double t0, const VectorXd& x0,
               const ControlSignal& u) {
  const auto d = sys.dim();
  const auto m = sys.inputs();
  if (x0.size() != d) throw InvalidArgument("solve: initial state has wrong dimension");
  if (t == t0) return x0;
  const double lo = std::min(t, t0);
  const double hi = std::max(t, t0);
  if (u.empty() || u.dimension() != m) throw DomainError("solve: control signal missing or of wrong dimension");
  const double tol = kBoundaryTol * std::max(1.0, std::abs(hi));
  if (u.start() > lo + tol || u.end() < hi - tol) {
    throw InvalidArgument("solve: control signal does not cover the integration interval");
  }
  u.check_in(sys.control_range());

  std::vector<double> cuts = sys.breakpoints(lo, hi);
  for (const auto& p : u.pieces()) {
    if (p.start > lo && p.start < hi) cuts.push_back(p.start);
  }
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Each piece: d/dt (x, 1) = [[A, Bu], [0, 0]] (x, 1), solved exactly.
  auto advance = [&](const VectorXd& x, double a, double b) {
    const double mid = 0.5 * (a + b);
    auto [am, bm] = sys.coefficients(mid);
    MatrixXd aug = MatrixXd::Zero(d + 1, d + 1);
    aug.topLeftCorner(d, d) = am;
    aug.topRightCorner(d, 1) = bm * u.value(mid);
    const MatrixXd e = expm(aug * (b - a));
    return VectorXd(e.topLeftCorner(d, d) * x + e.topRightCorner(d, 1));
  };

  VectorXd x = x0;
  if (t > t0) {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) x = advance(x, cuts[i], cuts[i + 1]);
  } else {
    for (std::size_t i = cuts.size() - 1; i > 0; --i) x = advance(x, cuts[i], cuts[i - 1]);
  }
  return x;
}

PeriodicSystem time_reverse(const PeriodicSystem& sys, double mu) {
  const double period = sys.period();
  std::vector<double> cuts{0.0};
  for (const auto& s : sys.segments()) cuts.push_back(sys.phase(mu - s.start));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> unique_cuts;
  for (double c : cuts) {
    if (period - c <= kBoundaryTol * period) continue;
    if (unique_cuts.empty() || c - unique_cuts.back() > kBoundaryTol * period) {
      unique_cuts.push_back(c);
    }
  }
  unique_cuts.push_back(period);

  std::vector<CoefficientSegment> out;
  out.reserve(unique_cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < unique_cuts.size(); ++i) {
    const double mid = 0.5 * (unique_cuts[i] + unique_cuts[i + 1]);
    auto [a, b] = sys.coefficients(mu - mid);
    out.push_back({unique_cuts[i], unique_cuts[i + 1], -a, -b});
  }
  return PeriodicSystem(period, std::move(out), sys.control_range());
}

}  // namespace pcs
