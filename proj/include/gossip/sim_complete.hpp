#pragma once

#include <optional>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

using XiVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Aggregate clock of rate n over all n^2 ordered pairs; (x, y) uniform, self-pairs included.
Event next_event(Index n, RngStream& rng);

/// Regenerates the event sequence of a run from its event stream ("virtual" log).
class EventStream {
 public:
  EventStream(Index n, RngStream rng) : n_(n), rng_(rng) {}
  Event next() { return next_event(n_, rng_); }

 private:
  Index n_;
  RngStream rng_;
};

/// Replays a materialized log. `horizon` is the time up to which the log is complete.
class EventLogCursor {
 public:
  explicit EventLogCursor(const EventLog& log) : log_(log) {}
  Event next();

 private:
  const EventLog& log_;
  std::size_t position_ = 0;
};

struct CompleteSnapshot {
  double time;
  OpinionConfig config;
  XiVector xi;
};

struct CompleteGraphRun {
  OpinionConfig initial;
  OpinionConfig config;  // state at the horizon
  XiVector xi;           // interaction attempts per vertex, self-pairs counted once
  double horizon = 0.0;
  std::int64_t event_count = 0;
  std::vector<double> snapshot_times;
  std::vector<CompleteSnapshot> snapshots;
  std::optional<EventLog> events;  // only when requested

  const CompleteSnapshot& snapshot_at(double t) const;
};

struct RunOptions {
  bool record_events = false;
};

/// Initial opinions come from rng.substream(0), events from rng.substream(1).
CompleteGraphRun run(const InitialDistribution& dist, Index n, double horizon,
                     const std::vector<double>& snapshot_times, const RngStream& rng,
                     RunOptions options = {});

/// Runs from a given configuration, drawing events from `events`.
CompleteGraphRun run_from(OpinionConfig initial, double horizon, const std::vector<double>& snapshot_times,
                          RngStream events, RunOptions options = {});

/// Run driven by a recorded log; the log must cover the horizon.
CompleteGraphRun replay(OpinionConfig initial, const EventLog& log, double horizon,
                        const std::vector<double>& snapshot_times);

struct XjStatistic {
  std::vector<std::int64_t> counts;  // counts[j] = #{x : xi_t(x) = j}
  double t = 0.0;
  Index n = 0;
};

XjStatistic xj_counts(const CompleteGraphRun& run, double t);

/// E[X_j^t] = N (2t)^j / j! (1 - 1/(2N))^j exp(-2t(1 - 1/(2N))).
double expected_xj(Index n, double t, int j);

struct PerturbedReplay {
  double original;    // omega_t(x)
  double perturbed;   // omega-hat_t(x), replayed from the shifted initial state
  double difference;  // perturbation field at x, propagated through the same averages
  std::int64_t j;     // xi_t(x)
};

/// Replays the events up to time t twice, once with delta added to the initial opinion at x.
PerturbedReplay perturbed_replay(const OpinionConfig& initial, const EventLog& log, Index x, double delta, double t);
PerturbedReplay perturbed_replay(const OpinionConfig& initial, const RngStream& events, Index x, double delta, double t);

/// Mean of the opinions and the population variance (1/N) sum (w - mean)^2.
double sample_mean(const OpinionConfig& config);
double sample_variance(const OpinionConfig& config);

}  // namespace gossip
