#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "gossip/convolution.hpp"
#include "gossip/core.hpp"
#include "gossip/runge_kutta.hpp"

namespace gossip {

/// Masses on the dyadics k / 2^J, k = 0..2^J, of [0, 1]; value(k) maps back through offset + scale * k / 2^J.
template <typename Scalar>
struct AtomicMeasure {
  int level = 1;
  VectorX<Scalar> masses;
  Scalar offset = 0;
  Scalar scale = 1;
  Scalar snapped_mass_total = 0;
  Scalar time = 0;

  Index denominator() const { return Index{1} << level; }
  Scalar normalized_value(Index k) const { return static_cast<Scalar>(k) / static_cast<Scalar>(denominator()); }
  Scalar value(Index k) const { return offset + scale * normalized_value(k); }
  Scalar total_mass() const { return masses.sum(); }

  static AtomicMeasure zeros(int level) {
    if (level < 1 || level > 24) throw Error(Errc::invalid_config, "dyadic level must lie in [1, 24]");
    AtomicMeasure mu;
    mu.level = level;
    mu.masses = VectorX<Scalar>::Zero((Index{1} << level) + 1);
    return mu;
  }

  /// Normalizes the atoms' range to [0, 1]; every atom must land on a level-J dyadic.
  static AtomicMeasure from_atoms(const std::vector<std::pair<double, double>>& atoms, int level) {
    if (atoms.empty()) throw Error(Errc::invalid_distribution, "no atoms");
    AtomicMeasure mu = zeros(level);
    double lo = atoms.front().first, hi = atoms.front().first;
    for (const auto& [v, m] : atoms) {
      if (!(m >= 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_distribution, "atoms need finite values, mass >= 0");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mu.offset = static_cast<Scalar>(lo);
    mu.scale = static_cast<Scalar>(hi > lo ? hi - lo : 1.0);
    const double den = static_cast<double>(mu.denominator());
    for (const auto& [v, m] : atoms) {
      const double position = (v - lo) / double(mu.scale) * den;
      const double k = std::round(position);
      if (std::abs(position - k) > 1e-9) {
        throw Error(Errc::invalid_distribution, "atom " + std::to_string(v) + " is not a level-" +
                                                    std::to_string(level) + " dyadic of the support");
      }
      mu.masses(static_cast<Index>(k)) += static_cast<Scalar>(m);
    }
    if (mu.total_mass() > Scalar(1) + Scalar(1e-9)) throw Error(Errc::invalid_distribution, "total mass above 1");
    return mu;
  }
};

/// Masses of mu * mu on k / 2^J, k = 0..2^{J+1}.
template <typename Scalar>
VectorX<Scalar> atomic_self_convolve(const AtomicMeasure<Scalar>& mu,
                                     ConvolutionBackend backend = ConvolutionBackend::fft) {
  return convolve(mu.masses, mu.masses, backend);
}

template <typename Scalar>
struct AtomicRhs {
  VectorX<Scalar> rate;
  Scalar snapped_rate;  // mass per unit time routed through odd-numerator halving
};

/// Pushes each convolution atom s to s/2; s/2 = k / 2^{J+1} with k odd is split equally between
/// its two level-J neighbours.
template <typename Scalar>
VectorX<Scalar> halve_onto_level(const VectorX<Scalar>& conv, Scalar* odd_mass = nullptr) {
  const Index top = (conv.size() - 1) / 2;
  VectorX<Scalar> out = VectorX<Scalar>::Zero(top + 1);
  Scalar odd = 0;
  for (Index k = 0; k < conv.size(); ++k) {
    if (k % 2 == 0) {
      out(k / 2) += conv(k);
    } else {
      out(k / 2) += conv(k) / 2;
      out(k / 2 + 1) += conv(k) / 2;
      odd += conv(k);
    }
  }
  if (odd_mass) *odd_mass = odd;
  return out;
}

/// 2 (half#(mu * mu) - mu).
template <typename Scalar>
AtomicRhs<Scalar> atomic_rhs(const AtomicMeasure<Scalar>& mu, ConvolutionBackend backend = ConvolutionBackend::fft) {
  Scalar odd = 0;
  const VectorX<Scalar> halved = halve_onto_level(atomic_self_convolve(mu, backend), &odd);
  return {Scalar(2) * (halved - mu.masses), Scalar(2) * odd};
}

template <typename Scalar>
struct AtomOptions {
  ButcherTableau<Scalar> tableau = ButcherTableau<Scalar>::classic_rk4();
  ConvolutionBackend backend = ConvolutionBackend::fft;
  Scalar clip_tolerance = std::max(Scalar(1e-12), Scalar(64) * std::numeric_limits<Scalar>::epsilon());
};

/// Integrates the atom masses; values in [-clip_tolerance, 0) are clipped to zero, lower ones abort.
template <typename Scalar>
std::vector<AtomicMeasure<Scalar>> integrate_atoms(const AtomicMeasure<Scalar>& mu0, Scalar dt, Scalar horizon,
                                                   const std::vector<Scalar>& snapshot_times,
                                                   const AtomOptions<Scalar>& options = {}) {
  AtomicMeasure<Scalar> shape = mu0;
  std::vector<Scalar> stage_snapped;
  Scalar snapped = mu0.snapped_mass_total;
  std::vector<AtomicMeasure<Scalar>> out;

  auto f = [&](const VectorX<Scalar>& masses) {
    shape.masses = masses;
    AtomicRhs<Scalar> r = atomic_rhs(shape, options.backend);
    stage_snapped.push_back(r.snapped_rate);
    return r.rate;
  };
  auto snapshot = [&](Scalar t, const VectorX<Scalar>& masses) {
    AtomicMeasure<Scalar> mu = mu0;
    mu.masses = masses;
    mu.time = t;
    mu.snapped_mass_total = snapped;
    out.push_back(std::move(mu));
  };
  auto project = [&](const StepInfo<Scalar>& info) {
    for (std::size_t s = 0; s < stage_snapped.size() && s < info.tableau.stages(); ++s) {
      snapped += info.dt * info.tableau.b[s] * stage_snapped[s];
    }
    stage_snapped.clear();
    for (Index k = 0; k < info.after.size(); ++k) {
      Scalar& m = info.after(k);
      if (m < Scalar(0)) {
        if (m < -options.clip_tolerance || !std::isfinite(double(m))) {
          throw Error(Errc::instability, "atom mass " + std::to_string(double(m)) + " at t = " +
                                             std::to_string(double(info.t_begin + info.dt)));
        }
        m = Scalar(0);
      }
    }
  };
  integrate_fixed_step<Scalar>(mu0.masses, dt, horizon, snapshot_times, options.tableau, f, snapshot, project);
  return out;
}

}  // namespace gossip
