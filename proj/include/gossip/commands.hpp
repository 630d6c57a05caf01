#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gossip {

/// Where a command writes. An explicit directory wins; otherwise
/// $GOSSIP_OUTPUT_ROOT (default "runs") / <experiment_id>-<timestamp>.
struct OutputOptions {
  std::string directory;
  std::string experiment_id;
  bool quiet = false;
};

std::filesystem::path resolve_output_dir(const OutputOptions& out, const std::string& command);

struct SimulateConfig {
  long n = 1000;
  double horizon = 1.0;
  std::string dist = "ber:0.5";
  std::uint64_t seed = 1;
  int replicas = 1;
  std::vector<double> snapshots;  // empty: {0, horizon}
  unsigned threads = 0;
  OutputOptions out;
};

struct TorusConfigArgs {
  int d = 1;
  long n = 64;
  double horizon = 0.05;
  std::string profile = "sin1";
  std::vector<std::string> test_functions = {"sin1", "cos1"};
  std::uint64_t seed = 1;
  int replicas = 1;
  std::vector<double> snapshots;
  unsigned threads = 0;
  OutputOptions out;
};

struct PdeConfig {
  std::string dist = "linear2x";
  double half_width = 2.0;
  long n_cells = 4096;
  double dt = 1e-3;
  double horizon = 1.0;
  std::vector<double> snapshots;  // empty: 11 evenly spaced
  std::string backend = "fft";
  OutputOptions out;
};

struct AtomsConfig {
  std::string dist = "ber:0.5";
  int level = 12;
  double dt = 1e-3;
  double horizon = 1.0;
  std::vector<double> snapshots;
  OutputOptions out;
};

struct CompareConfig {
  std::string a;
  std::string b;
  double w1_tolerance = 0.01;
  double moment_tolerance = 0.01;
  OutputOptions out;
};

struct VerifyConfig {
  bool full = false;
  std::vector<int> only;  // empty: all criteria
  OutputOptions out;
};

/// Each command returns the process exit code and throws gossip::Error on invalid input
/// or numerical failure. Progress goes to `log`.
int cmd_simulate(const SimulateConfig& config, std::ostream& log);
int cmd_simulate_torus(const TorusConfigArgs& config, std::ostream& log);
int cmd_solve_pde(const PdeConfig& config, std::ostream& log);
int cmd_solve_atoms(const AtomsConfig& config, std::ostream& log);
int cmd_compare(const CompareConfig& config, std::ostream& log);
int cmd_verify(const VerifyConfig& config, std::ostream& log);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 1;
inline constexpr int numerical = 2;
inline constexpr int acceptance = 3;
}  // namespace exit_code

}  // namespace gossip
