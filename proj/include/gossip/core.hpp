#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gossip/error.hpp"
#include "gossip/rng.hpp"

namespace gossip {

using Index = Eigen::Index;

/// Opinions of N agents at process time `time`. Vertices are 0-based.
struct OpinionConfig {
  Eigen::VectorXd opinions;
  double time = 0.0;

  Index n_vertices() const { return opinions.size(); }
};

/// Replace the opinions at x and y by their mean. x == y leaves the vector unchanged.
template <typename Derived>
void apply_average_inplace(Eigen::DenseBase<Derived>& opinions, Index x, Index y) {
  const Index n = opinions.size();
  if (x < 0 || x >= n || y < 0 || y >= n) {
    throw Error(Errc::invalid_vertex, "pair (" + std::to_string(x) + ", " + std::to_string(y) +
                                          ") outside [0, " + std::to_string(n) + ")");
  }
  if (x == y) return;
  const auto mid = (opinions(x) + opinions(y)) / 2;
  opinions(x) = mid;
  opinions(y) = mid;
}

OpinionConfig apply_average(OpinionConfig config, Index x, Index y);

/// Catalog of initial opinion laws.
class InitialDistribution {
 public:
  enum class Kind { point_mass, bernoulli, uniform, linear_2x, cauchy, piecewise_linear };

  static InitialDistribution point_mass(double c);
  static InitialDistribution bernoulli(double p);
  static InitialDistribution uniform(double a, double b);
  /// Density 2u on [0, 1].
  static InitialDistribution linear_2x();
  static InitialDistribution cauchy(double scale);
  /// Piecewise-linear density through (x, density) knots, zero outside; normalized on construction.
  static InitialDistribution piecewise_linear(std::vector<std::pair<double, double>> knots);

  /// Parses "point:c", "ber:p", "uniform:a,b", "linear2x", "cauchy:a", "piecewise:x0:y0,x1:y1,...".
  static InitialDistribution parse(const std::string& text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  /// M with support in [-M, M]; +inf for cauchy.
  double support_bound() const;
  /// Smallest interval containing the support.
  std::pair<double, double> support() const;

  bool is_atomic() const { return kind_ == Kind::point_mass || kind_ == Kind::bernoulli; }
  bool has_density() const { return !is_atomic(); }

  /// (value, mass) atoms; atomic kinds only.
  std::vector<std::pair<double, double>> atoms() const;

  /// Density with the midpoint convention at jump discontinuities.
  double pdf(double u) const;
  double cdf(double u) const;
  double sample(RngStream& rng) const;

 private:
  InitialDistribution(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> knots_;
  std::vector<double> knot_cdf_;
};

/// n i.i.d. draws; time = 0.
OpinionConfig sample_initial(const InitialDistribution& dist, Index n, RngStream& rng);

/// One pair interaction after an exponential waiting time.
struct Event {
  double waiting_time;
  std::uint32_t x;
  std::uint32_t y;
};

/// Events in order of occurrence. Complete up to `horizon`: the next event, if any, lies beyond it.
struct EventLog {
  std::vector<Event> events;
  double horizon = 0.0;
};

}  // namespace gossip
