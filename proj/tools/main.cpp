#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = pilotwave::cli;

int main(int argc, char** argv) {
  CLI::App app{"Pilot-wave simulations of coin claps and the Stern-Gerlach experiment"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  cli::CoinArgs coin;
  auto* coin_cmd = app.add_subcommand("coin", "Repeated claps of a spinning coin");
  coin_cmd->add_option("--preset", coin.preset, "Built-in protocol: fig2, fig3, fig4, fig5");
  coin_cmd->add_option("--protocol", coin.protocol, "JSON file {\"axes\": [...], \"trials\": N, \"seed\": S}")
      ->check(CLI::ExistingFile);
  coin_cmd->add_option("--axes", coin.axes, "Inline axes separated by ';', e.g. \"z;y;z\" or \"z;0,1,1\"");
  coin_cmd->add_option("--trials", coin.trials, "Number of trials (default 10000)");
  coin_cmd->add_option("--seed", coin.seed, "Random seed (default 0)");
  coin_cmd->add_option("--out", coin.out, "Output directory")->capture_default_str();

  cli::CurvesArgs curves;
  auto* curves_cmd = app.add_subcommand("curves", "Classical and quantum agreement curves");
  curves_cmd->add_option("--angles", curves.angle_count, "Number of angles from 0 to 180 degrees")
      ->capture_default_str();
  curves_cmd->add_option("--out", curves.out, "Output directory")->capture_default_str();

  cli::SternGerlachArgs sg;
  std::vector<double> pure;
  auto* sg_cmd = app.add_subcommand("stern-gerlach", "Bohmian trajectories from the magnet exit to the screen");
  sg_cmd->add_option("--preset", sg.preset, "Figure preset: fig7, fig8, fig9");
  auto* pure_opt = sg_cmd->add_option("--pure", pure, "Pure state THETA0 PHI0 in degrees")->expected(2);
  sg_cmd->add_flag("--mixture", sg.mixture, "Unpolarised beam");
  sg_cmd->add_option("--n,--trials", sg.n, "Number of trajectories (presets default to 6)");
  sg_cmd->add_option("--seed", sg.seed, "Random seed")->capture_default_str();
  sg_cmd->add_option("--config", sg.config, "JSON file with physical constants")->check(CLI::ExistingFile);
  sg_cmd->add_option("--out", sg.out, "Output directory")->capture_default_str();
  std::vector<double> snapshots;
  auto* snapshots_opt = sg_cmd->add_option("--snapshots", snapshots, "Density profile times in s after the magnet exit");
  sg_cmd->add_option("--traj-limit", sg.traj_limit, "Trajectories written to CSV, 0 for all")->capture_default_str();
  sg_cmd->add_option("--record-every", sg.record_every, "Record every k-th RK4 step")->capture_default_str();
  sg_cmd->add_option("--steps", sg.steps, "RK4 steps from exit to screen")->capture_default_str();
  bool no_halving = false;
  sg_cmd->add_flag("--no-halving-check", no_halving, "Skip the step-halving convergence check");

  cli::ValidateFieldArgs vf;
  auto* vf_cmd = app.add_subcommand("validate-field", "Grid Pauli solver against the closed-form packets");
  vf_cmd->add_option("--config", vf.config, "JSON file with physical constants")->check(CLI::ExistingFile);
  vf_cmd->add_option("--nx", vf.nx, "Grid nodes along x")->capture_default_str();
  vf_cmd->add_option("--nz", vf.nz, "Grid nodes along z")->capture_default_str();
  vf_cmd->add_option("--steps", vf.steps, "Time steps through the magnet")->capture_default_str();
  vf_cmd->add_option("--box", vf.box_sigma, "Box width in units of sigma0")->capture_default_str();
  vf_cmd->add_option("--theta", vf.theta_deg, "Initial theta0 in degrees")->capture_default_str();
  vf_cmd->add_option("--phi", vf.phi_deg, "Initial phi0 in degrees")->capture_default_str();
  vf_cmd->add_flag("--snapshot", vf.snapshot, "Also write the final lab-frame spinor");
  vf_cmd->add_option("--out", vf.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*coin_cmd) return cli::cmd_coin(coin);
  if (*curves_cmd) return cli::cmd_curves(curves);
  if (*sg_cmd) {
    if (*pure_opt) sg.pure = pure;
    if (*snapshots_opt) sg.snapshots = snapshots;
    sg.verify_step_halving = !no_halving;
    return cli::cmd_stern_gerlach(sg);
  }
  if (*vf_cmd) return cli::cmd_validate_field(vf);
  return cli::kExitUsage;
}
