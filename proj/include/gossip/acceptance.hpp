#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gossip/runge_kutta.hpp"

namespace gossip {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Quick mode shrinks replica counts and sizes where a criterion allows it; full mode runs them as stated.
  bool full = true;
  std::vector<int> only;
  std::filesystem::path scratch_dir;
  /// Time stepper for the solver criteria; exposed so a corrupted table can be shown to fail.
  ButcherTableau<double> tableau = ButcherTableau<double>::classic_rk4();
};

CriterionResult check_conservation(const AcceptanceOptions& options);
CriterionResult check_interaction_counts(const AcceptanceOptions& options);
CriterionResult check_perturbation_bound(const AcceptanceOptions& options);
CriterionResult check_cauchy_oracle(const AcceptanceOptions& options);
CriterionResult check_pde_moments(const AcceptanceOptions& options);
CriterionResult check_hydrodynamic_limit(const AcceptanceOptions& options);
CriterionResult check_atomic_limit(const AcceptanceOptions& options);
CriterionResult check_martingale_residual(const AcceptanceOptions& options);
CriterionResult check_heat_limit(const AcceptanceOptions& options);
CriterionResult check_determinism(const AcceptanceOptions& options);

/// Runs the selected criteria in order, printing one PASS/FAIL line each to `log`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

}  // namespace gossip
