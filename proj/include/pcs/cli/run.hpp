#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcs/control_set.hpp"
#include "pcs/poincare.hpp"

namespace pcs::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kHypothesisViolated = 3,
  kNumericalError = 4,
  kIoError = 5,
};

struct ScenarioConfig {
  std::string analysis;  // floquet | reach | control-set | sphere | quasi-affine | examples
  std::string builtin;
  std::string system_path;
  std::optional<nlohmann::json> system_inline;
  std::string qsys_path;
  std::string family_path;

  int tau_grid_n = 16;
  int k_max = 64;
  int n_directions = 0;  // 0: default for the dimension
  double tau = 0.0;
  double step = 1e-3;
  double t_end = 10.0;
  int trajectories = 8;
  int samples = 64;
  double period_v = 1.0;
  int max_members = 64;

  double tol_conv = 1e-8;
  double tol_rank = 1e-10;
  double tol_group = 1e-9;
  double tol_center = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  std::filesystem::path out_dir = "out";
  std::string format = "csv";
  bool reproducible = false;
};

/// Overlays the keys present in a JSON config object.
void apply_config(ScenarioConfig& cfg, const nlohmann::json& j);

/// Checks ranges and names; throws ConfigError.
void validate(const ScenarioConfig& cfg);

/// Runs the selected analysis, writing artifacts under cfg.out_dir and a
/// short summary to `log`. Errors are reported as a JSON record on `err` and
/// mapped to an exit code.
int run(const ScenarioConfig& cfg, std::ostream& log, std::ostream& err);

/// d = 1: rows (tau, lower, upper) of the inner fiber intervals. Otherwise
/// rows (tau, x_1..x_d) of inner support points.
void export_band(const ControlSetSandwich& sandwich, const std::filesystem::path& path,
                 const std::string& comment = "");

/// Orthographic projections (first d sphere coordinates) of trajectories plus
/// equator equilibria of the homogeneous flow at phase 0 (d = 2).
void export_portrait(const PeriodicSystem& sys, const std::vector<SphereTrajectory>& trajectories,
                     const std::filesystem::path& path, const std::string& comment = "");

/// Angles θ in [0, 2π) where the equator field vanishes (d = 2).
std::vector<double> equator_equilibria(const PeriodicSystem& sys, double tau, int resolution = 3600);

}  // namespace pcs::cli
