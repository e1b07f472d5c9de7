#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pcs/control_set.hpp"
#include "pcs/floquet.hpp"
#include "pcs/periodic_system.hpp"

namespace pcs {

/// B(v) = B_0 + Σ v_i B_i.
struct AffineInput {
  std::vector<MatrixXd> terms;  // B_0, B_1, ..., B_p
};

/// B(v) by multilinear interpolation on a tensor grid. `values` is stored
/// with the last parameter varying fastest.
struct TableInput {
  std::vector<std::vector<double>> axes;
  std::vector<MatrixXd> values;
};

/// ẋ = A(v)x + B(v)u with A(v) = A_0 + Σ v_i A_i, u ∈ U, v ∈ V.
class QuasiAffineSystem {
 public:
  QuasiAffineSystem(std::vector<MatrixXd> a, std::variant<AffineInput, TableInput> b,
                    ControlRange u_range, std::optional<ControlRange> v_range);

  int dim() const { return static_cast<int>(a_.front().rows()); }
  int params() const { return static_cast<int>(a_.size()) - 1; }
  int inputs() const { return inputs_; }
  const ControlRange& control_range() const { return u_; }
  /// V; absent when there are no parameters.
  const std::optional<ControlRange>& parameter_range() const { return v_; }

  MatrixXd a_of(const VectorXd& v) const;
  MatrixXd b_of(const VectorXd& v) const;

 private:
  std::vector<MatrixXd> a_;
  std::variant<AffineInput, TableInput> b_;
  ControlRange u_;
  std::optional<ControlRange> v_;
  int inputs_ = 0;
};

/// A T_v-periodic piecewise-constant parameter control.
struct PeriodicParameterSignal {
  struct Piece {
    double start;
    double end;
    VectorXd value;
  };
  double period = 1.0;
  std::vector<Piece> pieces;

  static PeriodicParameterSignal constant(double period, const VectorXd& value);
};

/// The T_v-periodic system with coefficients A(v(t)), B(v(t)).
PeriodicSystem freeze_periodic(const QuasiAffineSystem& qsys, const PeriodicParameterSignal& v);

/// Throws HypothesisViolated if some Floquet multiplier of `sys` has modulus
/// within tol.center of 1.
void require_hyperbolic(const PeriodicSystem& sys, const FloquetTolerances& tol = {});

/// Initial value of the unique periodic solution under the periodic control u,
/// which must start at 0 and span a whole number of periods.
VectorXd periodic_fixed_point(const PeriodicSystem& sys_v, const ControlSignal& u,
                              const FloquetTolerances& tol = {});

struct UnionOptions {
  SandwichOptions sandwich;
  int tau_grid_n = 16;
  std::vector<VectorXd> directions;  // empty: default sample
};

struct UnionMember {
  std::size_t index = 0;
  PeriodicParameterSignal signal;
  bool ok = false;
  std::string message;
  std::optional<ControlSetSandwich> sandwich;
  std::vector<double> projected_support;  // max over τ of inner supports
};

struct UnionResult {
  std::vector<VectorXd> directions;
  std::vector<UnionMember> members;
  std::vector<double> envelope;    // max over members
  std::vector<VectorXd> cloud;     // inner support points of all fibers
  std::vector<std::string> log;
  std::vector<std::string> hypotheses;
};

/// Inner approximation of the control set of the quasi-affine system from a
/// finite family of periodic parameter controls. Members that violate the
/// hypotheses are logged and skipped.
UnionResult union_control_set(const QuasiAffineSystem& qsys,
                              const std::vector<PeriodicParameterSignal>& family,
                              const UnionOptions& options = {});

/// Piecewise-constant signals on 1, 2 and 4 equal segments with values at the
/// vertices and centre of V, excluding repetitions, thinned to max_members by
/// a fixed stride.
std::vector<PeriodicParameterSignal> default_family(const QuasiAffineSystem& qsys, double period,
                                                    std::size_t max_members = 64);

}  // namespace pcs
