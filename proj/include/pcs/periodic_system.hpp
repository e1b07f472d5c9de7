#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Compact convex control range U ⊂ ℝᵐ.
class ControlRange {
 public:
  struct Box {
    VectorXd lower;
    VectorXd upper;
  };
  struct Polytope {
    std::vector<VectorXd> vertices;  // convex hull is the range
  };
  struct Ball {
    int dimension = 1;
    double radius = 1.0;
  };

  ControlRange(Box box);
  ControlRange(Polytope polytope);
  ControlRange(Ball ball);

  /// The box [-r, r]^m.
  static ControlRange symmetric_box(int m, double r = 1.0);

  int dimension() const;

  /// max over u ∈ U of ⟨c, u⟩.
  double support(const VectorXd& c) const;

  /// A maximizer of ⟨c, u⟩ over U.
  VectorXd argmax(const VectorXd& c) const;

  bool contains(const VectorXd& u, double tol = 1e-12) const;

  /// max over u ∈ U of ‖u‖₂.
  double max_norm() const;

  /// True when 0 lies in the interior (checked exactly for Box and Ball,
  /// for Polytope by the positivity of the support on a direction sample).
  bool is_neighborhood_of_origin() const;

  /// U = -U.
  bool is_symmetric() const;

  const std::variant<Box, Polytope, Ball>& variant() const { return range_; }

 private:
  std::variant<Box, Polytope, Ball> range_;
};

/// One piece of the coefficient segmentation of [0, T).
struct CoefficientSegment {
  double start = 0.0;
  double end = 0.0;
  MatrixXd a;
  MatrixXd b;
};

/// Piecewise-constant control u(t) on a finite horizon.
class ControlSignal {
 public:
  struct Piece {
    double start;
    double end;
    VectorXd value;
  };

  ControlSignal() = default;
  explicit ControlSignal(std::vector<Piece> pieces);

  static ControlSignal constant(double start, double end, const VectorXd& value);

  bool empty() const { return pieces_.empty(); }
  double start() const;
  double end() const;
  int dimension() const;
  const std::vector<Piece>& pieces() const { return pieces_; }

  /// Right-continuous evaluation; the right endpoint takes the last value.
  const VectorXd& value(double t) const;

  /// Throws InvalidArgument if some value lies outside `range`.
  void check_in(const ControlRange& range) const;

  /// u(· + shift).
  ControlSignal shifted(double shift) const;

 private:
  std::vector<Piece> pieces_;
};

/// X(target, source) of the homogeneous equation.
struct FundamentalMatrix {
  double target = 0.0;
  double source = 0.0;
  MatrixXd value;
};

/// ẋ = A(t)x + B(t)u, u ∈ U, with T-periodic piecewise-constant coefficients.
/// Immutable; all members are safe to call concurrently.
class PeriodicSystem {
 public:
  PeriodicSystem(double period, std::vector<CoefficientSegment> segments, ControlRange range);

  static PeriodicSystem constant(const MatrixXd& a, const MatrixXd& b, double period,
                                 ControlRange range);

  int dim() const { return static_cast<int>(segments_.front().a.rows()); }
  int inputs() const { return static_cast<int>(segments_.front().b.cols()); }
  double period() const { return period_; }
  const std::vector<CoefficientSegment>& segments() const { return segments_; }
  const ControlRange& control_range() const { return range_; }

  /// t mod T in [0, T).
  double phase(double t) const;

  /// Index of the segment containing phase(t).
  std::size_t segment_index(double t) const;

  /// (A(t), B(t)), right-continuous at segment boundaries.
  std::pair<const MatrixXd&, const MatrixXd&> coefficients(double t) const;

  /// Absolute times of coefficient switches in the open interval (lo, hi).
  std::vector<double> breakpoints(double lo, double hi) const;

  /// X(t, s) for arbitrary finite t, s.
  MatrixXd fundamental(double t, double s) const;

  /// X(T + tau, tau).
  MatrixXd monodromy(double tau) const;

 private:
  MatrixXd forward(double t, double s) const;  // requires t >= s

  double period_;
  std::vector<CoefficientSegment> segments_;
  ControlRange range_;
  std::vector<MatrixXd> segment_flow_;  // exp(A_i · length_i)
};

std::pair<MatrixXd, MatrixXd> eval_coeffs(const PeriodicSystem& sys, double t);

FundamentalMatrix fundamental_matrix(const PeriodicSystem& sys, double t, double s);

/// φ(t; t0, x0, u), exact per piece of the common refinement of the
/// coefficient and control segmentations. Backward solutions (t < t0) allowed.
VectorXd solve(const PeriodicSystem& sys, double t, double t0, const VectorXd& x0,
               const ControlSignal& u);

/// The reversal ẏ = -A(μ - t)y - B(μ - t)u, re-segmented onto [0, T).
PeriodicSystem time_reverse(const PeriodicSystem& sys, double mu);

}  // namespace pcs
