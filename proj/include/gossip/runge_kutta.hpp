#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gossip/convolution.hpp"
#include "gossip/error.hpp"

namespace gossip {

/// Explicit Runge-Kutta coefficients (strictly lower-triangular `a`).
template <typename Scalar>
struct ButcherTableau {
  std::vector<std::vector<Scalar>> a;
  std::vector<Scalar> b;
  std::vector<Scalar> c;

  static ButcherTableau classic_rk4() {
    return {{{}, {Scalar(1) / 2}, {Scalar(0), Scalar(1) / 2}, {Scalar(0), Scalar(0), Scalar(1)}},
            {Scalar(1) / 6, Scalar(1) / 3, Scalar(1) / 3, Scalar(1) / 6},
            {Scalar(0), Scalar(1) / 2, Scalar(1) / 2, Scalar(1)}};
  }

  std::size_t stages() const { return b.size(); }
};

/// One explicit step of y' = f(y). Stage derivatives are written to `stages`.
template <typename Scalar, typename Rhs>
VectorX<Scalar> rk_step(const ButcherTableau<Scalar>& tableau, Rhs&& f, const VectorX<Scalar>& y, Scalar dt,
                        std::vector<VectorX<Scalar>>& stages) {
  stages.resize(tableau.stages());
  for (std::size_t s = 0; s < tableau.stages(); ++s) {
    VectorX<Scalar> probe = y;
    for (std::size_t r = 0; r < s; ++r) {
      if (tableau.a[s][r] != Scalar(0)) probe += (dt * tableau.a[s][r]) * stages[r];
    }
    stages[s] = f(probe);
  }
  VectorX<Scalar> next = y;
  for (std::size_t s = 0; s < tableau.stages(); ++s) next += (dt * tableau.b[s]) * stages[s];
  return next;
}

template <typename Scalar>
struct StepInfo {
  Scalar t_begin;
  Scalar dt;
  const VectorX<Scalar>& before;
  VectorX<Scalar>& after;  // hooks may project the new state (e.g. clip round-off)
  const std::vector<VectorX<Scalar>>& stages;
  const ButcherTableau<Scalar>& tableau;
};

/// Fixed-step integration of an autonomous system that lands exactly on each snapshot time
/// by shortening the step before it. `on_snapshot(t, y)` fires for every requested time,
/// `after_step(info)` after every step, before the state is accepted.
template <typename Scalar, typename Rhs, typename OnSnapshot, typename AfterStep>
VectorX<Scalar> integrate_fixed_step(VectorX<Scalar> y, Scalar dt, Scalar horizon, const std::vector<Scalar>& times,
                                     const ButcherTableau<Scalar>& tableau, Rhs&& f, OnSnapshot&& on_snapshot,
                                     AfterStep&& after_step) {
  if (!(dt > Scalar(0))) throw Error(Errc::invalid_config, "time step must be positive");
  if (!(horizon >= Scalar(0))) throw Error(Errc::invalid_schedule, "horizon must be >= 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= Scalar(0) && times[i] <= horizon) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw Error(Errc::invalid_schedule, "snapshot times must be increasing inside [0, horizon]");
    }
  }

  std::vector<VectorX<Scalar>> stages;
  Scalar t = 0;
  std::size_t next = 0;
  while (next < times.size() && times[next] <= t) on_snapshot(times[next++], y);
  // Steps are counted from the last stop so that round-off does not creep into t.
  Scalar segment_start = 0;
  long steps_in_segment = 0;
  while (t < horizon) {
    const Scalar stop = next < times.size() ? times[next] : horizon;
    Scalar target = segment_start + static_cast<Scalar>(steps_in_segment + 1) * dt;
    bool lands = false;
    if (target >= stop - dt * Scalar(1e-9)) {
      target = stop;
      lands = true;
    }
    const Scalar h = target - t;
    VectorX<Scalar> advanced = rk_step(tableau, f, y, h, stages);
    after_step(StepInfo<Scalar>{t, h, y, advanced, stages, tableau});
    y = std::move(advanced);
    t = target;
    ++steps_in_segment;
    if (lands) {
      segment_start = t;
      steps_in_segment = 0;
      while (next < times.size() && times[next] <= t) on_snapshot(times[next++], y);
    }
  }
  return y;
}

}  // namespace gossip
