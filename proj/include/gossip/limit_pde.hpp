#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gossip/convolution.hpp"
#include "gossip/core.hpp"
#include "gossip/runge_kutta.hpp"

namespace gossip {

/// Density sampled at the n+1 nodes u_i = -L + i h, h = 2L/n, of [-L, L]; n even so 0 is a node.
template <typename Scalar>
struct DensityGrid {
  Scalar half_width = 1;
  Index n_cells = 2;
  VectorX<Scalar> values;
  Scalar time = 0;

  static DensityGrid zeros(Scalar half_width, Index n_cells) {
    if (!(half_width > Scalar(0)) || n_cells < 2 || n_cells % 2 != 0) {
      throw Error(Errc::invalid_config, "grid needs L > 0 and an even cell count >= 2");
    }
    return {half_width, n_cells, VectorX<Scalar>::Zero(n_cells + 1), Scalar(0)};
  }

  /// Samples the density of `dist` at the nodes (midpoint value at jumps).
  static DensityGrid from_distribution(const InitialDistribution& dist, Scalar half_width, Index n_cells) {
    DensityGrid grid = zeros(half_width, n_cells);
    for (Index i = 0; i <= n_cells; ++i) grid.values(i) = static_cast<Scalar>(dist.pdf(double(grid.node(i))));
    return grid;
  }

  template <typename F>
  static DensityGrid from_function(F&& density, Scalar half_width, Index n_cells) {
    DensityGrid grid = zeros(half_width, n_cells);
    for (Index i = 0; i <= n_cells; ++i) grid.values(i) = density(grid.node(i));
    return grid;
  }

  Scalar spacing() const { return Scalar(2) * half_width / static_cast<Scalar>(n_cells); }
  Scalar node(Index i) const { return -half_width + static_cast<Scalar>(i) * spacing(); }
  Index size() const { return n_cells + 1; }
};

/// Composite trapezoid weights (1/2 at both ends, 1 elsewhere), without the spacing factor.
template <typename Scalar>
VectorX<Scalar> trapezoid_weights(Index count) {
  VectorX<Scalar> w = VectorX<Scalar>::Ones(count);
  if (count > 0) {
    w(0) = Scalar(1) / 2;
    w(count - 1) = Scalar(1) / 2;
  }
  return w;
}

/// (rho * rho)(v_k) on v_k = -2L + k h, k = 0..2n: h * sum_j (w rho)_j (w rho)_{k-j}, w the trapezoid weights.
template <typename Scalar>
DensityGrid<Scalar> self_convolve(const DensityGrid<Scalar>& grid,
                                  ConvolutionBackend backend = ConvolutionBackend::fft) {
  const VectorX<Scalar> weighted = grid.values.cwiseProduct(trapezoid_weights<Scalar>(grid.size()));
  DensityGrid<Scalar> out{Scalar(2) * grid.half_width, 2 * grid.n_cells, {}, grid.time};
  out.values = grid.spacing() * convolve(weighted, weighted, backend);
  return out;
}

/// Right-hand side 4 (rho * rho)(2 u_i) - 2 rho_i; 2 u_i is node 2i of the convolution grid.
template <typename Scalar>
VectorX<Scalar> rhs(const DensityGrid<Scalar>& grid, ConvolutionBackend backend = ConvolutionBackend::fft) {
  const DensityGrid<Scalar> conv = self_convolve(grid, backend);
  VectorX<Scalar> out(grid.size());
  for (Index i = 0; i < grid.size(); ++i) out(i) = Scalar(4) * conv.values(2 * i) - Scalar(2) * grid.values(i);
  return out;
}

template <typename Scalar>
struct Moments {
  Scalar mass;
  Scalar mean;
  Scalar variance;
};

template <typename Scalar>
Scalar trapezoid_integral(const DensityGrid<Scalar>& grid, const VectorX<Scalar>& integrand) {
  return grid.spacing() * trapezoid_weights<Scalar>(grid.size()).dot(integrand);
}

template <typename Scalar>
Scalar mass(const DensityGrid<Scalar>& grid) {
  return trapezoid_integral(grid, grid.values);
}

template <typename Scalar>
Moments<Scalar> moments(const DensityGrid<Scalar>& grid) {
  VectorX<Scalar> nodes(grid.size());
  for (Index i = 0; i < grid.size(); ++i) nodes(i) = grid.node(i);
  const Scalar m = mass(grid);
  if (!(m > Scalar(0))) throw Error(Errc::undefined_moment, "mean and variance need positive mass");
  const Scalar first = trapezoid_integral<Scalar>(grid, nodes.cwiseProduct(grid.values)) / m;
  const Scalar second = trapezoid_integral<Scalar>(grid, nodes.cwiseProduct(nodes).cwiseProduct(grid.values)) / m;
  return {m, first, second - first * first};
}

/// Conservative step bound 0.1 / (2 + 4 * mass * max rho).
template <typename Scalar>
Scalar default_dt(const DensityGrid<Scalar>& grid) {
  const Scalar bound = Scalar(0.1) / (Scalar(2) + Scalar(4) * grid.spacing() * grid.values.sum() *
                                                      grid.values.maxCoeff());
  return std::min(Scalar(1e-3), bound);
}

template <typename Scalar>
struct PdeOptions {
  ButcherTableau<Scalar> tableau = ButcherTableau<Scalar>::classic_rk4();
  ConvolutionBackend backend = ConvolutionBackend::fft;
  Scalar negativity_tolerance =
      std::max(Scalar(1e-10), Scalar(64) * std::numeric_limits<Scalar>::epsilon());  // relative to max |rho|
  /// Called after each step; receives the step record and the current grid geometry.
  std::function<void(const StepInfo<Scalar>&, const DensityGrid<Scalar>&)> on_step;
};

/// Time-integrates the limit equation; returns the grids at `snapshot_times`.
template <typename Scalar>
std::vector<DensityGrid<Scalar>> integrate(const DensityGrid<Scalar>& grid0, Scalar dt, Scalar horizon,
                                           const std::vector<Scalar>& snapshot_times,
                                           const PdeOptions<Scalar>& options = {}) {
  if (dt > Scalar(1.0000001) * Scalar(0.1) /
                (Scalar(2) + Scalar(4) * grid0.spacing() * grid0.values.cwiseAbs().sum() *
                                 grid0.values.cwiseAbs().maxCoeff())) {
    throw Error(Errc::invalid_config, "dt above the stability bound " + std::to_string(double(default_dt(grid0))));
  }
  DensityGrid<Scalar> shape = grid0;
  std::vector<DensityGrid<Scalar>> out;
  auto f = [&](const VectorX<Scalar>& values) {
    shape.values = values;
    return rhs(shape, options.backend);
  };
  auto snapshot = [&](Scalar t, const VectorX<Scalar>& values) {
    out.push_back({grid0.half_width, grid0.n_cells, values, t});
  };
  auto check = [&](const StepInfo<Scalar>& info) {
    const Scalar scale = info.after.cwiseAbs().maxCoeff();
    const Scalar lowest = info.after.minCoeff();
    if (!std::isfinite(double(scale)) || lowest < -options.negativity_tolerance * scale) {
      throw Error(Errc::instability, "density undershoot " + std::to_string(double(lowest)) + " at t = " +
                                         std::to_string(double(info.t_begin + info.dt)) +
                                         "; reduce dt or refine the grid");
    }
    if (options.on_step) options.on_step(info, grid0);
  };
  integrate_fixed_step<Scalar>(grid0.values, dt, horizon, snapshot_times, options.tableau, f, snapshot, check);
  return out;
}

/// m(t) Cauchy(a)(u) with m(t) = 1 / (1 + c e^{2t}), the mass-m Cauchy family solving the limit equation.
template <typename Scalar>
Scalar scaled_cauchy_solution(Scalar a, Scalar c, Scalar t, Scalar u) {
  const Scalar m = Scalar(1) / (Scalar(1) + c * std::exp(Scalar(2) * t));
  return m * a / (std::numbers::pi_v<Scalar> * (a * a + u * u));
}

/// Cauchy(a)(u) / (2 e^{2t} - 1): a candidate closed form that does not satisfy the mass equation.
template <typename Scalar>
Scalar cauchy_candidate_2e2t(Scalar a, Scalar t, Scalar u) {
  return a / (std::numbers::pi_v<Scalar> * (a * a + u * u)) / (Scalar(2) * std::exp(Scalar(2) * t) - Scalar(1));
}

}  // namespace gossip
