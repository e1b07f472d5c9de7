#include "pcs/quasi_affine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcs/errors.hpp"
#include "pcs/parallel.hpp"

namespace pcs {

namespace {

void require_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string("quasi-affine system: non-finite ") + what);
}

std::vector<VectorXd> range_vertices(const ControlRange& r) {
  std::vector<VectorXd> out;
  if (const auto* box = std::get_if<ControlRange::Box>(&r.variant())) {
    const auto p = box->lower.size();
    for (long mask = 0; mask < (1L << p); ++mask) {
      VectorXd v(p);
      for (Eigen::Index i = 0; i < p; ++i) v(i) = (mask >> (p - 1 - i)) & 1 ? box->upper(i) : box->lower(i);
      out.push_back(v);
    }
  } else if (const auto* poly = std::get_if<ControlRange::Polytope>(&r.variant())) {
    out = poly->vertices;
  }
  return out;
}

VectorXd range_center(const ControlRange& r) {
  if (const auto* box = std::get_if<ControlRange::Box>(&r.variant())) return 0.5 * (box->lower + box->upper);
  const auto verts = range_vertices(r);
  VectorXd c = VectorXd::Zero(verts.front().size());
  for (const auto& v : verts) c += v;
  return c / static_cast<double>(verts.size());
}

}  // namespace

QuasiAffineSystem::QuasiAffineSystem(std::vector<MatrixXd> a, std::variant<AffineInput, TableInput> b,
                                     ControlRange u_range, std::optional<ControlRange> v_range)
    : a_(std::move(a)), b_(std::move(b)), u_(std::move(u_range)), v_(std::move(v_range)) {
  if (a_.empty()) throw InvalidArgument("quasi-affine system: A_0 is required");
  const auto d = a_.front().rows();
  if (d < 1) throw InvalidArgument("quasi-affine system: empty state");
  for (const auto& m : a_) {
    if (m.rows() != d || m.cols() != d) throw InvalidArgument("quasi-affine system: A_i must be d x d");
    require_finite(m, "A_i");
  }
  const int p = params();
  if (p == 0) {
    v_.reset();
  } else {
    if (!v_) throw InvalidArgument("quasi-affine system: V is required when p > 0");
    if (std::holds_alternative<ControlRange::Ball>(v_->variant())) {
      throw InvalidArgument("quasi-affine system: V must be a box or polytope");
    }
    if (v_->dimension() != p) throw InvalidArgument("quasi-affine system: V dimension differs from the number of A_i");
    if (!v_->is_neighborhood_of_origin()) {
      throw InvalidArgument("quasi-affine system: V must contain 0 in its interior");
    }
  }
  if (const auto* aff = std::get_if<AffineInput>(&b_)) {
    if (static_cast<int>(aff->terms.size()) != p + 1) {
      throw InvalidArgument("quasi-affine system: affine B needs p + 1 terms");
    }
    inputs_ = static_cast<int>(aff->terms.front().cols());
    for (const auto& m : aff->terms) {
      if (m.rows() != d || m.cols() != inputs_) throw InvalidArgument("quasi-affine system: B_i shape mismatch");
      require_finite(m, "B_i");
    }
  } else {
    const auto& tab = std::get<TableInput>(b_);
    if (static_cast<int>(tab.axes.size()) != p) throw InvalidArgument("quasi-affine system: table needs one axis per parameter");
    std::size_t count = 1;
    for (const auto& axis : tab.axes) {
      if (axis.size() < 2) throw InvalidArgument("quasi-affine system: table axes need two or more points");
      if (!std::is_sorted(axis.begin(), axis.end()) ||
          std::adjacent_find(axis.begin(), axis.end()) != axis.end()) {
        throw InvalidArgument("quasi-affine system: table axes must be strictly increasing");
      }
      count *= axis.size();
    }
    if (tab.values.size() != count) throw InvalidArgument("quasi-affine system: table size mismatch");
    inputs_ = static_cast<int>(tab.values.front().cols());
    for (const auto& m : tab.values) {
      if (m.rows() != d || m.cols() != inputs_) throw InvalidArgument("quasi-affine system: table entry shape mismatch");
      require_finite(m, "table entry");
    }
  }
  if (u_.dimension() != inputs_) throw InvalidArgument("quasi-affine system: U dimension differs from B columns");
}

MatrixXd QuasiAffineSystem::a_of(const VectorXd& v) const {
  if (v.size() != params()) throw InvalidArgument("quasi-affine system: parameter has wrong dimension");
  MatrixXd a = a_.front();
  for (int i = 0; i < params(); ++i) a += v(i) * a_[i + 1];
  return a;
}

MatrixXd QuasiAffineSystem::b_of(const VectorXd& v) const {
  if (v.size() != params()) throw InvalidArgument("quasi-affine system: parameter has wrong dimension");
  if (const auto* aff = std::get_if<AffineInput>(&b_)) {
    MatrixXd b = aff->terms.front();
    for (int i = 0; i < params(); ++i) b += v(i) * aff->terms[i + 1];
    return b;
  }
  const auto& tab = std::get<TableInput>(b_);
  const int p = params();
  std::vector<std::size_t> cell(p);
  std::vector<double> frac(p);
  for (int i = 0; i < p; ++i) {
    const auto& axis = tab.axes[i];
    const double tol = 1e-12 * (1.0 + std::abs(axis.back() - axis.front()));
    if (v(i) < axis.front() - tol || v(i) > axis.back() + tol) {
      throw DomainError("quasi-affine system: parameter outside the B table");
    }
    const double x = std::clamp(v(i), axis.front(), axis.back());
    std::size_t j = std::upper_bound(axis.begin(), axis.end(), x) - axis.begin();
    j = std::clamp<std::size_t>(j, 1, axis.size() - 1) - 1;
    cell[i] = j;
    frac[i] = (x - axis[j]) / (axis[j + 1] - axis[j]);
  }
  MatrixXd b = MatrixXd::Zero(dim(), inputs_);
  for (long mask = 0; mask < (1L << p); ++mask) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int i = 0; i < p; ++i) {
      const bool hi = (mask >> i) & 1;
      w *= hi ? frac[i] : 1.0 - frac[i];
      flat = flat * tab.axes[i].size() + cell[i] + (hi ? 1 : 0);
    }
    if (w != 0.0) b += w * tab.values[flat];
  }
  return b;
}

PeriodicParameterSignal PeriodicParameterSignal::constant(double period, const VectorXd& value) {
  return {period, {{0.0, period, value}}};
}

PeriodicSystem freeze_periodic(const QuasiAffineSystem& qsys, const PeriodicParameterSignal& v) {
  if (v.pieces.empty()) throw InvalidArgument("freeze_periodic: empty parameter signal");
  std::vector<CoefficientSegment> segments;
  for (const auto& piece : v.pieces) {
    if (piece.value.size() != qsys.params()) throw InvalidArgument("freeze_periodic: parameter has wrong dimension");
    if (qsys.params() > 0 && !qsys.parameter_range()->contains(piece.value, 1e-12)) {
      throw InvalidArgument("freeze_periodic: parameter value outside V");
    }
    segments.push_back({piece.start, piece.end, qsys.a_of(piece.value), qsys.b_of(piece.value)});
  }
  return PeriodicSystem(v.period, std::move(segments), qsys.control_range());
}

void require_hyperbolic(const PeriodicSystem& sys, const FloquetTolerances& tol) {
  for (const auto& g : floquet_spectrum(monodromy(sys, 0.0), sys.period(), tol.group)) {
    const double modulus = std::exp(g.exponent * sys.period());
    if (classify_modulus(modulus, tol.center) == SpectralClass::Center) {
      std::ostringstream msg;
      msg << "system is not hyperbolic: Floquet exponent " << g.exponent << " (multiplicity "
          << g.multiplicity << ") is zero within tolerance";
      throw HypothesisViolated(msg.str());
    }
  }
}

VectorXd periodic_fixed_point(const PeriodicSystem& sys_v, const ControlSignal& u,
                              const FloquetTolerances& tol) {
  if (u.empty()) throw InvalidArgument("periodic_fixed_point: empty control");
  if (std::abs(u.start()) > 1e-12) throw InvalidArgument("periodic_fixed_point: control must start at 0");
  const double horizon = u.end();
  const double periods = horizon / sys_v.period();
  if (!(periods >= 0.5) || std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
    throw InvalidArgument("periodic_fixed_point: control must span a whole number of periods");
  }
  require_hyperbolic(sys_v, tol);
  const auto d = sys_v.dim();
  const MatrixXd lhs = MatrixXd::Identity(d, d) - sys_v.fundamental(horizon, 0.0);
  const VectorXd forced = solve(sys_v, horizon, 0.0, VectorXd::Zero(d), u);
  Eigen::FullPivLU<MatrixXd> lu(lhs);
  if (!lu.isInvertible()) throw HypothesisViolated("periodic_fixed_point: I - X(dT, 0) is singular");
  return lu.solve(forced);
}

UnionResult union_control_set(const QuasiAffineSystem& qsys,
                              const std::vector<PeriodicParameterSignal>& family,
                              const UnionOptions& options) {
  if (family.empty()) throw InvalidArgument("union_control_set: empty family");
  UnionResult out;
  const int d = qsys.dim();
  out.directions = options.directions.empty() ? sample_directions(d, default_direction_count(d))
                                              : options.directions;
  out.hypotheses = {
      "local accessibility of the quasi-affine system is assumed, not verified",
      "the family is finite, so the union is an inner approximation"};
  out.members.resize(family.size());
  SandwichOptions inner = options.sandwich;
  inner.threads = 1;
  parallel_for(
      family.size(),
      [&](std::size_t i) {
        UnionMember& m = out.members[i];
        m.index = i;
        m.signal = family[i];
        try {
          const PeriodicSystem sys = freeze_periodic(qsys, family[i]);
          require_hyperbolic(sys, inner.floquet);
          m.sandwich = control_set_sandwich(sys, uniform_tau_grid(sys, options.tau_grid_n),
                                            out.directions, inner);
          m.projected_support.assign(out.directions.size(), -std::numeric_limits<double>::infinity());
          for (const auto& f : m.sandwich->fibers) {
            for (std::size_t j = 0; j < f.inner.size(); ++j) {
              m.projected_support[j] = std::max(m.projected_support[j], f.inner[j]);
            }
          }
          m.ok = true;
        } catch (const HypothesisViolated& e) {
          m.message = std::string("hypothesis violated: ") + e.what();
        } catch (const NumericalError& e) {
          m.message = std::string("numerical failure: ") + e.what();
        }
      },
      options.sandwich.threads);
  out.envelope.assign(out.directions.size(), -std::numeric_limits<double>::infinity());
  for (const auto& m : out.members) {
    if (!m.ok) {
      out.log.push_back("member " + std::to_string(m.index) + " skipped: " + m.message);
      continue;
    }
    for (std::size_t j = 0; j < out.envelope.size(); ++j) {
      out.envelope[j] = std::max(out.envelope[j], m.projected_support[j]);
    }
    for (const auto& f : m.sandwich->fibers) {
      for (const auto& x : f.inner_points) {
        if (x.size() != 0) out.cloud.push_back(x);
      }
    }
  }
  return out;
}

std::vector<PeriodicParameterSignal> default_family(const QuasiAffineSystem& qsys, double period,
                                                    std::size_t max_members) {
  if (!(period > 0.0)) throw InvalidArgument("default_family: period must be positive");
  if (max_members < 1) throw InvalidArgument("default_family: max_members must be positive");
  std::vector<VectorXd> values;
  if (qsys.params() == 0) {
    values.push_back(VectorXd());
  } else {
    values = range_vertices(*qsys.parameter_range());
    values.push_back(range_center(*qsys.parameter_range()));
  }
  const std::size_t nv = values.size();
  std::vector<PeriodicParameterSignal> all;
  for (std::size_t nseg : {1, 2, 4}) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < nseg; ++i) total *= nv;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::size_t> pattern(nseg);
      for (std::size_t i = 0, c = code; i < nseg; ++i, c /= nv) pattern[nseg - 1 - i] = c % nv;
      const std::size_t half = nseg / 2;
      const bool repeated =
          nseg % 2 == 0 && std::equal(pattern.begin(), pattern.begin() + half, pattern.begin() + half);
      if (repeated) continue;
      PeriodicParameterSignal s;
      s.period = period;
      for (std::size_t i = 0; i < nseg; ++i) {
        s.pieces.push_back({period * i / nseg, period * (i + 1) / nseg, values[pattern[i]]});
      }
      all.push_back(std::move(s));
    }
  }
  if (all.size() <= max_members) return all;
  std::vector<PeriodicParameterSignal> thinned;
  for (std::size_t i = 0; i < max_members; ++i) thinned.push_back(all[i * all.size() / max_members]);
  return thinned;
}

}  // namespace pcs
