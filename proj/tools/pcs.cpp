// pcs: periodic linear control systems from the command line.

#include <iostream>

#include <CLI11.hpp>

#include "pcs/cli/io.hpp"
#include "pcs/cli/run.hpp"

namespace {

struct Flag {
  CLI::Option* option = nullptr;
  bool given() const { return option && option->count() > 0; }
};

}  // namespace

int main(int argc, char** argv) {
  using pcs::cli::ScenarioConfig;
  CLI::App app{"Periodic linear control systems: Floquet spaces, reachable sets, control sets, "
               "Poincare sphere and quasi-affine systems"};
  app.require_subcommand(1);

  ScenarioConfig flags;
  std::string config_path;
  app.add_option("--config", config_path, "JSON scenario file (flags override its keys)");
  Flag out{app.add_option("--out", flags.out_dir, "Output directory")};
  Flag format{app.add_option("--format", flags.format, "csv or json")};
  Flag seed{app.add_option("--seed", flags.seed, "Random seed")};
  Flag repro{app.add_flag("--reproducible", flags.reproducible, "Omit the timestamp header")};
  Flag builtin{app.add_option("--builtin", flags.builtin, "example61 | example62 | example63")};
  Flag system{app.add_option("--system", flags.system_path, "System JSON file")};
  Flag qsys{app.add_option("--qsys", flags.qsys_path, "Quasi-affine system JSON file")};
  Flag family{app.add_option("--family", flags.family_path, "Parameter family JSON file")};
  Flag tau_grid{app.add_option("--tau-grid", flags.tau_grid_n, "Number of phases in [0, T)")};
  Flag k_max{app.add_option("--k-max", flags.k_max, "Maximum number of periods")};
  Flag n_dirs{app.add_option("--directions", flags.n_directions, "Number of support directions (0: default)")};
  Flag tau{app.add_option("--tau", flags.tau, "Phase for the floquet analysis")};
  Flag step{app.add_option("--step", flags.step, "Sphere integration step")};
  Flag t_end{app.add_option("--t-end", flags.t_end, "Sphere integration horizon")};
  Flag trajs{app.add_option("--trajectories", flags.trajectories, "Number of sphere trajectories")};
  Flag samples{app.add_option("--samples", flags.samples, "Radial samples for the projected control set")};
  Flag period_v{app.add_option("--period-v", flags.period_v, "Period of generated parameter signals")};
  Flag members{app.add_option("--max-members", flags.max_members, "Cap on generated family members")};
  Flag tol_conv{app.add_option("--tol-conv", flags.tol_conv, "Support increment tolerance")};
  Flag tol_rank{app.add_option("--tol-rank", flags.tol_rank, "Gramian rank tolerance")};
  Flag tol_group{app.add_option("--tol-group", flags.tol_group, "Multiplier grouping tolerance")};
  Flag tol_center{app.add_option("--tol-center", flags.tol_center, "Unit-circle tolerance")};
  Flag threads{app.add_option("--threads", flags.threads, "Worker threads (0: all cores)")};

  for (const char* name : {"floquet", "reach", "control-set", "sphere", "quasi-affine", "examples"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("floquet")->description("Floquet multipliers, exponents and spectral subspaces");
  app.get_subcommand("reach")->description("Support functions of reachable fibers");
  app.get_subcommand("control-set")->description("Inner/outer approximation of the control set");
  app.get_subcommand("sphere")->description("Trajectories and control set on the Poincare sphere");
  app.get_subcommand("quasi-affine")->description("Union control set of a quasi-affine system");
  app.get_subcommand("examples")->description("List builtin systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pcs::cli::kConfigError;
  }

  ScenarioConfig cfg;
  try {
    if (!config_path.empty()) pcs::cli::apply_config(cfg, pcs::cli::load_json(config_path));
  } catch (const pcs::cli::IoError& e) {
    std::cerr << nlohmann::json{{"error", "io"}, {"message", e.what()}, {"exit_code", 5}}.dump() << "\n";
    return pcs::cli::kIoError;
  } catch (const pcs::Error& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}, {"exit_code", 2}}.dump() << "\n";
    return pcs::cli::kConfigError;
  }
  cfg.analysis = app.get_subcommands().front()->get_name();
  if (out.given()) cfg.out_dir = flags.out_dir;
  if (format.given()) cfg.format = flags.format;
  if (seed.given()) cfg.seed = flags.seed;
  if (repro.given()) cfg.reproducible = true;
  if (builtin.given()) cfg.builtin = flags.builtin, cfg.system_path.clear(), cfg.system_inline.reset();
  if (system.given()) cfg.system_path = flags.system_path, cfg.builtin.clear(), cfg.system_inline.reset();
  if (qsys.given()) cfg.qsys_path = flags.qsys_path;
  if (family.given()) cfg.family_path = flags.family_path;
  if (tau_grid.given()) cfg.tau_grid_n = flags.tau_grid_n;
  if (k_max.given()) cfg.k_max = flags.k_max;
  if (n_dirs.given()) cfg.n_directions = flags.n_directions;
  if (tau.given()) cfg.tau = flags.tau;
  if (step.given()) cfg.step = flags.step;
  if (t_end.given()) cfg.t_end = flags.t_end;
  if (trajs.given()) cfg.trajectories = flags.trajectories;
  if (samples.given()) cfg.samples = flags.samples;
  if (period_v.given()) cfg.period_v = flags.period_v;
  if (members.given()) cfg.max_members = flags.max_members;
  if (tol_conv.given()) cfg.tol_conv = flags.tol_conv;
  if (tol_rank.given()) cfg.tol_rank = flags.tol_rank;
  if (tol_group.given()) cfg.tol_group = flags.tol_group;
  if (tol_center.given()) cfg.tol_center = flags.tol_center;
  if (threads.given()) cfg.threads = flags.threads;

  return pcs::cli::run(cfg, std::cout, std::cerr);
}
