#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gossip/commands.hpp"
#include "gossip/error.hpp"
#include "gossip/io.hpp"

namespace {

void add_output(CLI::App* cmd, gossip::OutputOptions& out) {
  cmd->add_option("--out", out.directory, "Output directory (default: $GOSSIP_OUTPUT_ROOT/<id>-<timestamp>)");
  cmd->add_option("--id", out.experiment_id, "Experiment id used in the output directory name");
  cmd->add_flag("--quiet", out.quiet, "Suppress progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gossip;
  CLI::App app{"Averaging process simulator and hydrodynamic-limit solvers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Averaging process on the complete graph");
  simulate->add_option("--n", sim.n, "Number of vertices")->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim.horizon, "Time horizon")->check(CLI::NonNegativeNumber);
  simulate->add_option("--dist", sim.dist, "Initial distribution: point:c | ber:p | uniform:a,b | linear2x | piecewise:...");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--replicas", sim.replicas, "Independent replicas")->check(CLI::PositiveNumber);
  simulate->add_option("--snapshots", sim.snapshots, "Snapshot times (default: 0 and the horizon)")->delimiter(',');
  simulate->add_option("--threads", sim.threads, "Worker threads (0: hardware concurrency)");
  add_output(simulate, sim.out);

  TorusConfigArgs torus;
  auto* simulate_torus = app.add_subcommand("simulate-torus", "Averaging process on the discrete torus");
  simulate_torus->add_option("--d", torus.d, "Dimension")->check(CLI::Range(1, 3));
  simulate_torus->add_option("--n", torus.n, "Side length")->check(CLI::Range(2L, 1L << 20));
  simulate_torus->add_option("--t", torus.horizon, "Time horizon (macroscopic)")->check(CLI::NonNegativeNumber);
  simulate_torus->add_option("--profile", torus.profile, "Initial profile, e.g. sin1, cos2, 0.5*sin1+const:1");
  simulate_torus->add_option("--test-functions", torus.test_functions, "Fourier test functions")->delimiter(',');
  simulate_torus->add_option("--seed", torus.seed, "Master seed");
  simulate_torus->add_option("--replicas", torus.replicas, "Independent replicas")->check(CLI::PositiveNumber);
  simulate_torus->add_option("--snapshots", torus.snapshots, "Snapshot times")->delimiter(',');
  simulate_torus->add_option("--threads", torus.threads, "Worker threads (0: hardware concurrency)");
  add_output(simulate_torus, torus.out);

  PdeConfig pde;
  auto* solve_pde = app.add_subcommand("solve-pde", "Density solver for the limit equation");
  solve_pde->add_option("--dist", pde.dist, "Initial density: linear2x | uniform:a,b | cauchy:a | piecewise:...");
  solve_pde->add_option("--L", pde.half_width, "Grid half-width")->check(CLI::PositiveNumber);
  solve_pde->add_option("--n", pde.n_cells, "Number of grid cells (even)")->check(CLI::PositiveNumber);
  solve_pde->add_option("--dt", pde.dt, "Time step")->check(CLI::PositiveNumber);
  solve_pde->add_option("--t", pde.horizon, "Time horizon")->check(CLI::NonNegativeNumber);
  solve_pde->add_option("--snapshots", pde.snapshots, "Snapshot times (default: 11 evenly spaced)")->delimiter(',');
  solve_pde->add_option("--backend", pde.backend, "Convolution backend")->check(CLI::IsMember({"fft", "direct"}));
  add_output(solve_pde, pde.out);

  AtomsConfig atoms;
  auto* solve_atoms = app.add_subcommand("solve-atoms", "Dyadic atomic solver for Bernoulli and point data");
  solve_atoms->add_option("--dist", atoms.dist, "Atomic initial distribution: ber:p | point:c");
  solve_atoms->add_option("--J", atoms.level, "Dyadic level (2^J + 1 atoms)")->check(CLI::Range(1, 20));
  solve_atoms->add_option("--dt", atoms.dt, "Time step")->check(CLI::PositiveNumber);
  solve_atoms->add_option("--t", atoms.horizon, "Time horizon")->check(CLI::NonNegativeNumber);
  solve_atoms->add_option("--snapshots", atoms.snapshots, "Snapshot times (default: 11 evenly spaced)")->delimiter(',');
  add_output(solve_atoms, atoms.out);

  CompareConfig compare;
  auto* cmp = app.add_subcommand("compare", "Wasserstein-1 and moment comparison of two run directories");
  cmp->add_option("--a", compare.a, "First run directory")->required();
  cmp->add_option("--b", compare.b, "Second run directory")->required();
  cmp->add_option("--w1-tol", compare.w1_tolerance, "W1 tolerance")->check(CLI::NonNegativeNumber);
  cmp->add_option("--moment-tol", compare.moment_tolerance, "Moment tolerance")->check(CLI::NonNegativeNumber);
  add_output(cmp, compare.out);

  VerifyConfig verify;
  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  auto* quick = ver->add_flag("--quick", "Reduced replica counts (default)");
  auto* full = ver->add_flag("--full", verify.full, "Run every criterion at full size");
  quick->excludes(full);
  ver->add_option("--only", verify.only, "Criterion ids to run")->delimiter(',')->check(CLI::Range(1, 10));
  add_output(ver, verify.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim, std::cout);
    if (*simulate_torus) return cmd_simulate_torus(torus, std::cout);
    if (*solve_pde) return cmd_solve_pde(pde, std::cout);
    if (*solve_atoms) return cmd_solve_atoms(atoms, std::cout);
    if (*cmp) return cmd_compare(compare, std::cout);
    if (*ver) return cmd_verify(verify, std::cout);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return is_numerical(e.code()) ? exit_code::numerical : exit_code::validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::validation;
  }
  return exit_code::validation;
}
