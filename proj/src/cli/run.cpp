#include "pcs/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "pcs/cli/builtins.hpp"
#include "pcs/cli/io.hpp"
#include "pcs/floquet.hpp"
#include "pcs/parallel.hpp"
#include "pcs/quasi_affine.hpp"
#include "pcs/reachable.hpp"

namespace pcs::cli {

using nlohmann::json;
namespace fs = std::filesystem;

void apply_config(ScenarioConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "analysis") cfg.analysis = value.get<std::string>();
      else if (key == "builtin") cfg.builtin = value.get<std::string>();
      else if (key == "system") {
        if (value.is_string()) cfg.system_path = value.get<std::string>();
        else cfg.system_inline = value;
      }
      else if (key == "qsys") cfg.qsys_path = value.get<std::string>();
      else if (key == "family") cfg.family_path = value.get<std::string>();
      else if (key == "tau_grid") cfg.tau_grid_n = value.get<int>();
      else if (key == "k_max") cfg.k_max = value.get<int>();
      else if (key == "n_directions") cfg.n_directions = value.get<int>();
      else if (key == "tau") cfg.tau = value.get<double>();
      else if (key == "step") cfg.step = value.get<double>();
      else if (key == "t_end") cfg.t_end = value.get<double>();
      else if (key == "trajectories") cfg.trajectories = value.get<int>();
      else if (key == "samples") cfg.samples = value.get<int>();
      else if (key == "period_v") cfg.period_v = value.get<double>();
      else if (key == "max_members") cfg.max_members = value.get<int>();
      else if (key == "tol_conv") cfg.tol_conv = value.get<double>();
      else if (key == "tol_rank") cfg.tol_rank = value.get<double>();
      else if (key == "tol_group") cfg.tol_group = value.get<double>();
      else if (key == "tol_center") cfg.tol_center = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "out") cfg.out_dir = value.get<std::string>();
      else if (key == "format") cfg.format = value.get<std::string>();
      else if (key == "reproducible") cfg.reproducible = value.get<bool>();
      else throw ConfigError("unknown config key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void validate(const ScenarioConfig& cfg) {
  static const std::vector<std::string> analyses = {"floquet", "reach", "control-set", "sphere",
                                                    "quasi-affine", "examples"};
  if (cfg.analysis.empty()) throw ConfigError("no analysis selected");
  if (std::find(analyses.begin(), analyses.end(), cfg.analysis) == analyses.end()) {
    throw ConfigError("unknown analysis \"" + cfg.analysis + "\"");
  }
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
  if (cfg.tau_grid_n < 1) throw ConfigError("tau_grid must be positive");
  if (cfg.k_max < 1) throw ConfigError("k_max must be positive");
  if (cfg.n_directions < 0) throw ConfigError("n_directions must be non-negative");
  if (cfg.trajectories < 1 || cfg.samples < 1 || cfg.max_members < 1) {
    throw ConfigError("trajectories, samples and max_members must be positive");
  }
  for (double x : {cfg.step, cfg.t_end, cfg.period_v, cfg.tol_conv, cfg.tol_rank, cfg.tol_group, cfg.tol_center}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("step, t_end, period_v and tolerances must be positive");
  }
  if (!std::isfinite(cfg.tau)) throw ConfigError("tau must be finite");
  const int sources = !cfg.builtin.empty() + !cfg.system_path.empty() + cfg.system_inline.has_value();
  if (sources > 1) throw ConfigError("give at most one of builtin, system file, inline system");
}

namespace {

class Emitter {
 public:
  Emitter(const ScenarioConfig& cfg) : cfg_(cfg) {
    std::ostringstream c;
    if (!cfg.reproducible) {
      const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      std::tm tm{};
      gmtime_r(&now, &tm);
      c << "generated=" << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << " ";
    }
    c << "analysis=" << cfg.analysis << " seed=" << cfg.seed;
    comment_ = c.str();
  }

  const std::string& comment() const { return comment_; }

  void table(const std::string& name, const CsvTable& t) const {
    if (cfg_.format == "csv") {
      write_text(cfg_.out_dir / (name + ".csv"), t.str(comment_));
    } else {
      json doc = {{"meta", meta()}, {"rows", t.to_json()}};
      write_text(cfg_.out_dir / (name + ".json"), doc.dump(1) + "\n");
    }
  }

  void summary(json body) const {
    body["meta"] = meta();
    write_text(cfg_.out_dir / "summary.json", body.dump(1) + "\n");
  }

  json meta() const {
    json m = {{"analysis", cfg_.analysis}, {"seed", cfg_.seed}};
    if (!cfg_.reproducible) m["comment"] = comment_;
    return m;
  }

 private:
  const ScenarioConfig& cfg_;
  std::string comment_;
};

PeriodicSystem load_system(const ScenarioConfig& cfg) {
  if (!cfg.builtin.empty()) return builtin_system(cfg.builtin);
  if (!cfg.system_path.empty()) return parse_system(load_json(cfg.system_path));
  if (cfg.system_inline) return parse_system(*cfg.system_inline);
  throw ConfigError("no system given (use --builtin or --system)");
}

std::vector<std::string> direction_columns(const std::string& prefix, int d) {
  std::vector<std::string> cols;
  for (int i = 1; i <= d; ++i) cols.push_back(prefix + std::to_string(i));
  return cols;
}

std::vector<VectorXd> directions_for(const ScenarioConfig& cfg, int d) {
  const int n = cfg.n_directions > 0 ? cfg.n_directions : default_direction_count(d);
  return sample_directions(d, n, cfg.seed);
}

SandwichOptions sandwich_options(const ScenarioConfig& cfg) {
  SandwichOptions o;
  o.k_max = cfg.k_max;
  o.tol_conv = cfg.tol_conv;
  o.tol_rank = cfg.tol_rank;
  o.floquet = {cfg.tol_group, cfg.tol_center};
  o.threads = cfg.threads;
  return o;
}

const char* class_name(SpectralClass c) {
  switch (c) {
    case SpectralClass::Stable: return "stable";
    case SpectralClass::Center: return "center";
    default: return "unstable";
  }
}

void run_floquet(const ScenarioConfig& cfg, const Emitter& out, std::ostream& log) {
  const PeriodicSystem sys = load_system(cfg);
  const FloquetDecomposition fd = floquet_spaces(sys, cfg.tau, {cfg.tol_group, cfg.tol_center});
  CsvTable groups({"group", "exponent", "multiplicity", "class", "multiplier_re", "multiplier_im"});
  json exps = json::array();
  for (std::size_t g = 0; g < fd.groups.size(); ++g) {
    const auto& grp = fd.groups[g];
    for (const auto& mu : grp.multipliers) {
      groups.add_row({std::to_string(g), format_double(grp.exponent), std::to_string(grp.multiplicity),
                      class_name(grp.kind), format_double(mu.real()), format_double(mu.imag())});
    }
    exps.push_back({{"exponent", number(grp.exponent)}, {"multiplicity", grp.multiplicity}, {"class", class_name(grp.kind)}});
    log << "exponent " << format_double(grp.exponent) << " multiplicity " << grp.multiplicity << " ("
        << class_name(grp.kind) << ")\n";
  }
  out.table("floquet", groups);

  std::vector<std::string> cols = {"subspace", "column"};
  for (const auto& c : direction_columns("e_", sys.dim())) cols.push_back(c);
  CsvTable bases(cols);
  for (const auto& [name, basis] : {std::pair<const char*, const MatrixXd*>{"stable", &fd.stable},
                                    {"center", &fd.center}, {"unstable", &fd.unstable}}) {
    for (Eigen::Index k = 0; k < basis->cols(); ++k) {
      std::vector<std::string> row = {name, std::to_string(k)};
      for (Eigen::Index i = 0; i < basis->rows(); ++i) row.push_back(format_double((*basis)(i, k)));
      bases.add_row(row);
    }
  }
  out.table("subspaces", bases);
  out.summary({{"tau", number(fd.phase)},
               {"period", number(fd.period)},
               {"monodromy", to_json(fd.monodromy)},
               {"exponents", exps},
               {"dims", {{"stable", fd.stable.cols()}, {"center", fd.center.cols()}, {"unstable", fd.unstable.cols()}}}});
}

void run_reach(const ScenarioConfig& cfg, const Emitter& out, std::ostream& log) {
  const PeriodicSystem sys = load_system(cfg);
  const int d = sys.dim();
  const auto dirs = directions_for(cfg, d);
  const auto grid = uniform_tau_grid(sys, cfg.tau_grid_n);
  std::vector<ConvexSetApprox> fibers(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { fibers[i] = reachable_fiber(sys, grid[i], cfg.k_max, dirs); },
               cfg.threads);
  std::vector<std::string> cols = {"tau", "k", "dir_index"};
  for (const auto& c : direction_columns("p_", d)) cols.push_back(c);
  cols.insert(cols.end(), {"support", "unbounded"});
  CsvTable t(cols);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      std::vector<double> row = {grid[i], static_cast<double>(cfg.k_max), static_cast<double>(k)};
      for (int c = 0; c < d; ++c) row.push_back(dirs[k](c));
      row.push_back(fibers[i].support[k]);
      row.push_back(fibers[i].unbounded[k] ? 1.0 : 0.0);
      t.add_row(row);
      flagged += fibers[i].unbounded[k];
    }
  }
  out.table("reach", t);
  const GramianResult g = controllability_gramian(sys, d * sys.period(), cfg.tol_rank);
  log << "reachable fibers: " << grid.size() << " phases, " << dirs.size() << " directions, "
      << flagged << " flagged unbounded; controllable=" << (g.controllable ? "true" : "false") << "\n";
  out.summary({{"k_max", cfg.k_max},
               {"directions", dirs.size()},
               {"unbounded_flags", flagged},
               {"gramian", {{"controllable", g.controllable}, {"condition", number(g.condition)}, {"matrix", to_json(g.gramian)}}}});
}

CsvTable fiber_table(const ControlSetSandwich& s, int d) {
  std::vector<std::string> cols = {"tau"};
  for (const auto& c : direction_columns("p_", d)) cols.push_back(c);
  cols.insert(cols.end(), {"inner", "outer", "theorem_inner", "theorem_outer"});
  CsvTable t(cols);
  for (const auto& f : s.fibers) {
    for (std::size_t k = 0; k < f.directions.size(); ++k) {
      std::vector<double> row = {f.tau};
      for (int c = 0; c < d; ++c) row.push_back(f.directions[k](c));
      row.insert(row.end(), {f.inner[k], f.outer[k], f.theorem_inner[k], f.theorem_outer[k]});
      t.add_row(row);
    }
  }
  return t;
}

void run_control_set(const ScenarioConfig& cfg, const Emitter& out, std::ostream& log) {
  const PeriodicSystem sys = load_system(cfg);
  const int d = sys.dim();
  const auto s = control_set_sandwich(sys, uniform_tau_grid(sys, cfg.tau_grid_n), directions_for(cfg, d),
                                      sandwich_options(cfg));
  out.table("control_set", fiber_table(s, d));
  std::vector<std::string> cols = {"tau", "column"};
  for (const auto& c : direction_columns("e_", d)) cols.push_back(c);
  CsvTable centers(cols);
  double gap = 0.0, cond = 1.0;
  for (const auto& f : s.fibers) {
    gap = std::max(gap, f.max_gap());
    cond = std::max(cond, f.basis_condition);
    for (Eigen::Index k = 0; k < f.center_basis.cols(); ++k) {
      std::vector<double> row = {f.tau, static_cast<double>(k)};
      for (int i = 0; i < d; ++i) row.push_back(f.center_basis(i, k));
      centers.add_row(row);
    }
  }
  out.table("center_basis", centers);
  export_band(s, cfg.out_dir / "band.csv", out.comment());
  log << "control set: " << s.fibers.size() << " phases, unbounded=" << (s.unbounded ? "true" : "false")
      << ", max inner/outer gap " << format_double(gap) << "\n";
  out.summary({{"unbounded", s.unbounded},
               {"center_dim", s.center_dim},
               {"max_gap", number(gap)},
               {"max_basis_condition", number(cond)},
               {"gramian_condition", number(s.gramian.condition)}});
}

ControlSignal random_control(const ControlRange& range, double t_end, double piece, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ControlSignal::Piece> pieces;
  const long n = std::max(1L, static_cast<long>(std::ceil(t_end / piece)));
  for (long i = 0; i < n; ++i) {
    VectorXd c(range.dimension());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
    const double scale = range.is_neighborhood_of_origin() ? unit(rng) : 1.0;
    pieces.push_back({t_end * i / n, t_end * (i + 1) / n, scale * range.argmax(c)});
  }
  return ControlSignal(std::move(pieces));
}

void run_sphere(const ScenarioConfig& cfg, const Emitter& out, std::ostream& log) {
  const PeriodicSystem sys = load_system(cfg);
  const int d = sys.dim();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<SphereTrajectory> trajs;
  for (int i = 0; i < cfg.trajectories; ++i) {
    VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = normal(rng);
    SpherePoint p0 = embed(0.0, x);
    if (i % 2 == 1) {
      p0.s.head(d) = x.normalized();
      p0.s(d) = 0.0;
    }
    const ControlSignal u = (i % 2 == 1) ? ControlSignal::constant(0.0, cfg.t_end, VectorXd::Zero(sys.inputs()))
                                         : random_control(sys.control_range(), cfg.t_end, 0.5, rng);
    trajs.push_back(integrate_sphere(sys, p0, u, cfg.t_end, cfg.step));
  }
  std::vector<std::string> cols = {"trajectory", "t", "tau"};
  for (const auto& c : direction_columns("s_", d + 1)) cols.push_back(c);
  CsvTable t(cols);
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.01 / cfg.step)));
  double drift = 0.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    drift = std::max(drift, trajs[i].max_norm_drift);
    const auto& tr = trajs[i];
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      if (k % stride != 0 && k + 1 != tr.points.size()) continue;
      std::vector<double> row = {static_cast<double>(i), tr.times[k], tr.points[k].phase};
      for (int c = 0; c <= d; ++c) row.push_back(tr.points[k].s(c));
      t.add_row(row);
    }
  }
  out.table("sphere_trajectories", t);
  export_portrait(sys, trajs, cfg.out_dir / "portrait.csv", out.comment());

  json summary = {{"trajectories", trajs.size()}, {"max_norm_drift", number(drift)}};
  try {
    const auto s = control_set_sandwich(sys, uniform_tau_grid(sys, cfg.tau_grid_n), directions_for(cfg, d),
                                        sandwich_options(cfg));
    const ProjectedControlSet proj = project_control_set(s, cfg.samples);
    std::vector<std::string> pc = {"tau", "kind"};
    for (const auto& c : direction_columns("s_", d + 1)) pc.push_back(c);
    CsvTable pt(pc);
    double height = std::numeric_limits<double>::infinity();
    for (const auto& f : proj.fibers) {
      height = std::min(height, f.min_height);
      for (const auto& [kind, cloud] : {std::pair<const char*, const std::vector<SpherePoint>*>{"inner", &f.inner},
                                        {"outer", &f.outer}}) {
        for (const auto& p : *cloud) {
          std::vector<std::string> row = {format_double(f.tau), kind};
          for (int c = 0; c <= d; ++c) row.push_back(format_double(p.s(c)));
          pt.add_row(row);
        }
      }
    }
    for (const auto& p : proj.equator_points) {
      std::vector<std::string> row = {format_double(p.phase), "equator"};
      for (int c = 0; c <= d; ++c) row.push_back(format_double(p.s(c)));
      pt.add_row(row);
    }
    out.table("projected_control_set", pt);
    summary["projected"] = {{"unbounded", s.unbounded}, {"min_height", number(height)},
                            {"equator_points", proj.equator_points.size()}};
  } catch (const HypothesisViolated& e) {
    summary["projected"] = {{"skipped", e.what()}};
  }
  log << "sphere: " << trajs.size() << " trajectories, max norm drift " << format_double(drift) << "\n";
  out.summary(summary);
}

void run_quasi_affine(const ScenarioConfig& cfg, const Emitter& out, std::ostream& log) {
  if (cfg.qsys_path.empty()) throw ConfigError("quasi-affine needs --qsys <file>");
  const QuasiAffineSystem qsys = parse_quasi_affine(load_json(cfg.qsys_path));
  const auto family = cfg.family_path.empty()
                          ? default_family(qsys, cfg.period_v, static_cast<std::size_t>(cfg.max_members))
                          : parse_family(load_json(cfg.family_path), qsys);
  UnionOptions opts;
  opts.sandwich = sandwich_options(cfg);
  opts.tau_grid_n = cfg.tau_grid_n;
  opts.directions = directions_for(cfg, qsys.dim());
  const UnionResult r = union_control_set(qsys, family, opts);
  const int d = qsys.dim();

  std::vector<std::string> cols = direction_columns("p_", d);
  cols.push_back("support");
  CsvTable env(cols);
  for (std::size_t k = 0; k < r.directions.size(); ++k) {
    std::vector<double> row(r.directions[k].data(), r.directions[k].data() + d);
    row.push_back(r.envelope[k]);
    env.add_row(row);
  }
  out.table("union_envelope", env);

  CsvTable members({"member", "ok", "period", "pieces", "message"});
  std::size_t ok = 0;
  for (const auto& m : r.members) {
    members.add_row({std::to_string(m.index), m.ok ? "1" : "0", format_double(m.signal.period),
                     std::to_string(m.signal.pieces.size()), m.message});
    if (m.ok) {
      ++ok;
      out.table("member_" + std::to_string(m.index), fiber_table(*m.sandwich, d));
    }
  }
  out.table("members", members);

  CsvTable cloud(direction_columns("x_", d));
  for (const auto& x : r.cloud) cloud.add_row(std::vector<double>(x.data(), x.data() + d));
  out.table("union_cloud", cloud);

  json fam = json::array();
  for (const auto& m : r.members) {
    json pieces = json::array();
    for (const auto& p : m.signal.pieces) {
      pieces.push_back({{"start", number(p.start)}, {"end", number(p.end)}, {"value", to_json(p.value)}});
    }
    fam.push_back({{"period", number(m.signal.period)}, {"pieces", pieces}});
  }
  log << "quasi-affine: " << ok << " of " << r.members.size() << " members analysed\n";
  for (const auto& line : r.log) log << "  " << line << "\n";
  out.summary({{"members", r.members.size()}, {"analysed", ok}, {"hypotheses", r.hypotheses}, {"log", r.log},
               {"family", fam}});
}

const char* error_kind(int code) {
  switch (code) {
    case kConfigError: return "config";
    case kHypothesisViolated: return "hypothesis_violated";
    case kNumericalError: return "numerical";
    case kIoError: return "io";
    default: return "internal";
  }
}

}  // namespace

void export_band(const ControlSetSandwich& sandwich, const fs::path& path, const std::string& comment) {
  if (sandwich.fibers.empty()) throw InvalidArgument("export_band: empty sandwich");
  const int d = static_cast<int>(sandwich.fibers.front().directions.front().size());
  if (d == 1) {
    CsvTable t({"tau", "lower", "upper"});
    for (const auto& f : sandwich.fibers) {
      double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < f.directions.size(); ++k) {
        if (f.directions[k](0) > 0) hi = f.inner[k];
        else lo = -f.inner[k];
      }
      t.add_row({f.tau, lo, hi});
    }
    write_text(path, t.str(comment));
    return;
  }
  std::vector<std::string> cols = {"tau"};
  for (const auto& c : direction_columns("x_", d)) cols.push_back(c);
  CsvTable t(cols);
  for (const auto& f : sandwich.fibers) {
    for (const auto& x : f.inner_points) {
      if (x.size() == 0) continue;
      std::vector<double> row = {f.tau};
      row.insert(row.end(), x.data(), x.data() + d);
      t.add_row(row);
    }
  }
  write_text(path, t.str(comment));
}

std::vector<double> equator_equilibria(const PeriodicSystem& sys, double tau, int resolution) {
  if (sys.dim() != 2) throw InvalidArgument("equator_equilibria: needs d = 2");
  if (resolution < 8) throw InvalidArgument("equator_equilibria: resolution too small");
  const MatrixXd& a = sys.coefficients(tau).first;
  auto g = [&](double th) {
    const Eigen::Vector2d s(std::cos(th), std::sin(th));
    const Eigen::Vector2d n(-std::sin(th), std::cos(th));
    return n.dot(a * s);
  };
  std::vector<double> roots;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> vals(resolution + 1);
  for (int i = 0; i <= resolution; ++i) vals[i] = g(two_pi * i / resolution);
  if (std::all_of(vals.begin(), vals.end(), [](double v) { return std::abs(v) < 1e-14; })) return roots;
  for (int i = 0; i < resolution; ++i) {
    double lo = two_pi * i / resolution, hi = two_pi * (i + 1) / resolution;
    if (vals[i] == 0.0) {
      roots.push_back(lo);
      continue;
    }
    if (vals[i] * vals[i + 1] >= 0.0) continue;
    double glo = vals[i];
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0) == (glo < 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

void export_portrait(const PeriodicSystem& sys, const std::vector<SphereTrajectory>& trajectories,
                     const fs::path& path, const std::string& comment) {
  if (trajectories.empty()) throw InvalidArgument("export_portrait: no trajectories");
  const int d = sys.dim();
  std::vector<std::string> cols = {"kind", "id", "t", "tau", "angle"};
  for (const auto& c : direction_columns("p_", d)) cols.push_back(c);
  CsvTable t(cols);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& tr = trajectories[i];
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      std::vector<std::string> row = {"trajectory", std::to_string(i), format_double(tr.times[k]),
                                      format_double(tr.points[k].phase), format_double(nan)};
      for (int c = 0; c < d; ++c) row.push_back(format_double(tr.points[k].s(c)));
      t.add_row(row);
    }
  }
  if (d == 2) {
    const auto roots = equator_equilibria(sys, 0.0);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      t.add_row({"equilibrium", std::to_string(i), format_double(0.0), format_double(0.0), format_double(roots[i]),
                 format_double(std::cos(roots[i])), format_double(std::sin(roots[i]))});
    }
  }
  write_text(path, t.str(comment));
}

int run(const ScenarioConfig& cfg, std::ostream& log, std::ostream& err) {
  int code = kOk;
  std::string message;
  try {
    validate(cfg);
    if (cfg.analysis == "examples") {
      for (const auto& b : builtin_list()) log << b.name << "  " << b.description << "\n";
      return kOk;
    }
    const Emitter out(cfg);
    if (cfg.analysis == "floquet") run_floquet(cfg, out, log);
    else if (cfg.analysis == "reach") run_reach(cfg, out, log);
    else if (cfg.analysis == "control-set") run_control_set(cfg, out, log);
    else if (cfg.analysis == "sphere") run_sphere(cfg, out, log);
    else run_quasi_affine(cfg, out, log);
    return kOk;
  } catch (const ConfigError& e) {
    code = kConfigError, message = e.what();
  } catch (const InvalidArgument& e) {
    code = kConfigError, message = e.what();
  } catch (const DomainError& e) {
    code = kConfigError, message = e.what();
  } catch (const json::exception& e) {
    code = kConfigError, message = e.what();
  } catch (const HypothesisViolated& e) {
    code = kHypothesisViolated, message = e.what();
  } catch (const NumericalError& e) {
    code = kNumericalError, message = e.what();
  } catch (const IoError& e) {
    code = kIoError, message = e.what();
  } catch (const std::exception& e) {
    code = 1, message = e.what();
  }
  const json record = {{"error", error_kind(code)}, {"message", message}, {"exit_code", code}};
  err << record.dump() << "\n";
  if (code != kIoError && !cfg.analysis.empty() && cfg.analysis != "examples") {
    try {
      write_text(cfg.out_dir / "error.json", record.dump(1) + "\n");
    } catch (const Error&) {
    }
  }
  return code;
}

}  // namespace pcs::cli
