#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

/// Finite signed measure sum_i weights_i delta_{values_i}.
struct EmpiricalMeasure {
  Eigen::VectorXd values;
  Eigen::VectorXd weights;
  bool normalized = false;  // weights sum to one

  /// Mass 1/N at each opinion.
  static EmpiricalMeasure from_opinions(const Eigen::VectorXd& opinions);
  static EmpiricalMeasure from_atoms(const std::vector<std::pair<double, double>>& atoms);

  Index size() const { return values.size(); }
  double total_weight() const { return weights.sum(); }
};

/// G(t, u) together with its time derivative.
struct TestFunction {
  std::function<double(double, double)> evaluate;
  std::function<double(double, double)> time_derivative;
  std::string name;

  static TestFunction constant(double c);
  static TestFunction identity();
  static TestFunction square();
  /// Time independent G from a spatial function.
  static TestFunction stationary(std::function<double(double)> g, std::string name);
};

double pair(const EmpiricalMeasure& mu, const TestFunction& g, double t);

class ConvMethod {
 public:
  enum class Kind { exact, binned, subsample };

  static constexpr Index exact_cap = 20000;

  static ConvMethod exact() { return ConvMethod(Kind::exact, 0, RngStream(0, 0)); }
  static ConvMethod binned(Index bins) { return ConvMethod(Kind::binned, bins, RngStream(0, 0)); }
  static ConvMethod subsample(Index pairs, RngStream rng) { return ConvMethod(Kind::subsample, pairs, rng); }
  /// exact up to the size cap, binned(4096) above it.
  static ConvMethod automatic(Index atom_count) { return atom_count > exact_cap ? binned(4096) : exact(); }
  /// "exact", "binned:B", "subsample:K:seed".
  static ConvMethod parse(const std::string& text);

  Kind kind() const { return kind_; }
  Index count() const { return count_; }
  const RngStream& rng() const { return rng_; }
  std::string to_string() const;

 private:
  ConvMethod(Kind kind, Index count, RngStream rng) : kind_(kind), count_(count), rng_(rng) {}

  Kind kind_;
  Index count_;
  RngStream rng_;
};

/// <mu * nu, G(t, . / 2)> = sum_{x,y} w_x w'_y G(t, (v_x + v'_y) / 2).
double pair_convolution(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const TestFunction& g, double t,
                        const ConvMethod& method);
double pair_convolution(const EmpiricalMeasure& mu, const TestFunction& g, double t, const ConvMethod& method);

/// Right-continuous piecewise-linear CDF. Repeated abscissae encode jumps.
class Cdf {
 public:
  Cdf(std::vector<double> x, std::vector<double> f);

  static Cdf of(const EmpiricalMeasure& mu);
  /// Trapezoidal accumulation of a nonnegative density sampled at equispaced nodes, scaled to end at 1.
  static Cdf from_density(double first_node, double spacing, const Eigen::VectorXd& density);
  /// Tabulates an arbitrary CDF at `count` equispaced points of [lo, hi].
  static Cdf tabulate(const std::function<double(double)>& cdf, double lo, double hi, Index count);

  double operator()(double u) const;
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& f() const { return f_; }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
};

/// Integral of |F_a - F_b| over the real line, exact for piecewise-linear CDFs.
double wasserstein1(const Cdf& a, const Cdf& b);
/// mu must be normalized with nonnegative weights.
double wasserstein1(const EmpiricalMeasure& mu, const Cdf& reference);

struct TimedMeasure {
  double t;
  EmpiricalMeasure measure;
};

struct Residual {
  double t;
  double value;
};

/// R(t_k) = <pi_tk, G_tk> - <pi_0, G_0> - int_0^tk [2(<pi*pi, G(./2)> - <pi, G>) + <pi, dG/ds>] ds,
/// the integral taken by the trapezoid rule over the snapshot times.
std::vector<Residual> martingale_residual(const std::vector<TimedMeasure>& snapshots, const TestFunction& g,
                                          const ConvMethod& method);

struct ComparisonRow {
  std::string experiment_id;
  double t;
  std::string metric_name;
  double value;
  double tolerance;
  bool pass;
};

}  // namespace gossip
