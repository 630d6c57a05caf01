#pragma once

#include <complex>
#include <string>
#include <vector>

#include "gossip/analysis.hpp"
#include "gossip/core.hpp"

namespace gossip {

/// Opinions on (Z/NZ)^d, flattened with the first coordinate varying fastest.
struct TorusConfig {
  int dim = 1;
  Index side = 2;
  Eigen::VectorXd opinions;
  double time = 0.0;

  Index site_count() const { return opinions.size(); }
  std::vector<Index> coordinates(Index site) const;
  Index neighbor(Index site, int axis) const;  // site + e_axis (mod side)
};

/// Real profile on the continuous torus T^d = [0,1)^d as a finite Fourier sum.
class FourierProfile {
 public:
  struct Mode {
    Eigen::VectorXi frequency;
    std::complex<double> amplitude;
  };

  explicit FourierProfile(int dim) : dim_(dim) {}

  static FourierProfile constant(int dim, double c);
  /// sin(2 pi k u_axis) and cos(2 pi k u_axis).
  static FourierProfile sine(int dim, int k, int axis = 0);
  static FourierProfile cosine(int dim, int k, int axis = 0);
  /// "sin<k>", "cos<k>", "const:<c>", terms joined by '+', each optionally prefixed "<coef>*".
  static FourierProfile parse(const std::string& text, int dim);

  /// Adds amplitude at k and conj(amplitude) at -k unless k = 0.
  void add_real_mode(const Eigen::VectorXi& k, std::complex<double> amplitude);

  int dim() const { return dim_; }
  const std::vector<Mode>& modes() const { return modes_; }
  int max_frequency() const;
  bool is_real(double tol = 1e-12) const;
  std::complex<double> coefficient(const Eigen::VectorXi& k) const;
  double evaluate(const Eigen::VectorXd& u) const;
  double operator()(double u) const;  // d = 1

 private:
  int dim_;
  std::vector<Mode> modes_;
};

/// omega_0(x) = rho_0(x / N) at every lattice point.
TorusConfig init_from_profile(const FourierProfile& profile, Index n, int d);

struct TorusRun {
  TorusConfig config;  // state at the horizon
  std::int64_t event_count = 0;
  std::vector<TorusConfig> snapshots;
};

/// Each of the d N^d edges {x, x + e_a} rings at rate N^2 and averages its endpoints.
TorusRun run_torus(TorusConfig config, double horizon, const std::vector<double>& snapshot_times, RngStream rng);

/// Signed measure with weight omega(x) / N^d at position x / N.
struct LatticeMeasure {
  int dim = 1;
  Eigen::MatrixXd positions;  // dim x sites
  Eigen::VectorXd weights;

  EmpiricalMeasure as_empirical() const;  // d = 1 only
};

LatticeMeasure weighted_empirical(const TorusConfig& config);

/// <pi-hat, G> for G given by its Fourier sum.
double pair(const LatticeMeasure& measure, const FourierProfile& g);

/// <rho_t, G> for the heat flow d_t rho = (1/2) Laplacian rho; mode k decays by exp(-2 pi^2 |k|^2 t).
double heat_pairing(const FourierProfile& profile, const FourierProfile& g, double t);

}  // namespace gossip
