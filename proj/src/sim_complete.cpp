#include "gossip/sim_complete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gossip {

Event next_event(Index n, RngStream& rng) {
  Event event;
  event.waiting_time = rng.exponential(static_cast<double>(n));
  event.x = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(n)));
  event.y = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(n)));
  return event;
}

Event EventLogCursor::next() {
  if (position_ >= log_.events.size()) {
    return {std::numeric_limits<double>::infinity(), 0, 0};
  }
  return log_.events[position_++];
}

const CompleteSnapshot& CompleteGraphRun::snapshot_at(double t) const {
  for (const auto& snap : snapshots) {
    if (snap.time == t) return snap;
  }
  throw Error(Errc::missing_snapshot, "no snapshot at t = " + std::to_string(t));
}

namespace {

void validate_schedule(double horizon, const std::vector<double>& times) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw Error(Errc::invalid_schedule, "horizon must be finite and >= 0");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= horizon)) {
      throw Error(Errc::invalid_schedule, "snapshot time " + std::to_string(times[i]) + " outside [0, horizon]");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(Errc::invalid_schedule, "snapshot times must be strictly increasing");
    }
  }
}

template <typename Source>
CompleteGraphRun drive(OpinionConfig initial, double horizon, const std::vector<double>& times, Source& source,
                       bool record_events) {
  validate_schedule(horizon, times);
  const Index n = initial.n_vertices();

  CompleteGraphRun result;
  result.initial = initial;
  result.horizon = horizon;
  result.snapshot_times = times;
  result.config = std::move(initial);
  result.config.time = 0.0;
  result.xi = XiVector::Zero(n);
  if (record_events) result.events.emplace().horizon = horizon;

  auto& opinions = result.config.opinions;
  std::size_t next_snapshot = 0;
  double clock = 0.0;
  for (;;) {
    const Event event = source.next();
    const double event_time = clock + event.waiting_time;
    while (next_snapshot < times.size() && times[next_snapshot] < event_time) {
      OpinionConfig copy{opinions, times[next_snapshot]};
      result.snapshots.push_back({times[next_snapshot], std::move(copy), result.xi});
      ++next_snapshot;
    }
    if (event_time > horizon) break;
    if (event.x >= n || event.y >= n) {
      throw Error(Errc::replay, "event vertex outside the configuration");
    }
    apply_average_inplace(opinions, event.x, event.y);
    ++result.xi(event.x);
    if (event.y != event.x) ++result.xi(event.y);
    ++result.event_count;
    clock = event_time;
    if (record_events) result.events->events.push_back(event);
  }
  result.config.time = horizon;
  return result;
}

template <typename Source>
PerturbedReplay replay_pair(const OpinionConfig& initial, Source& source, Index x, double delta, double t) {
  const Index n = initial.n_vertices();
  if (x < 0 || x >= n) throw Error(Errc::invalid_vertex, "perturbed vertex outside the configuration");
  if (!(t >= 0.0)) throw Error(Errc::invalid_schedule, "replay time must be >= 0");

  Eigen::VectorXd original = initial.opinions;
  Eigen::VectorXd perturbed = initial.opinions;
  Eigen::VectorXd difference = Eigen::VectorXd::Zero(n);
  perturbed(x) += delta;
  difference(x) = delta;
  std::int64_t touches = 0;

  double clock = 0.0;
  for (;;) {
    const Event event = source.next();
    const double event_time = clock + event.waiting_time;
    if (event_time > t) break;
    if (event.x >= n || event.y >= n) throw Error(Errc::replay, "event vertex outside the configuration");
    apply_average_inplace(original, event.x, event.y);
    apply_average_inplace(perturbed, event.x, event.y);
    apply_average_inplace(difference, event.x, event.y);
    if (event.x == x || event.y == x) ++touches;
    clock = event_time;
  }
  return {original(x), perturbed(x), difference(x), touches};
}

}  // namespace

CompleteGraphRun run_from(OpinionConfig initial, double horizon, const std::vector<double>& snapshot_times,
                          RngStream events, RunOptions options) {
  EventStream source(initial.n_vertices(), events);
  return drive(std::move(initial), horizon, snapshot_times, source, options.record_events);
}

CompleteGraphRun run(const InitialDistribution& dist, Index n, double horizon,
                     const std::vector<double>& snapshot_times, const RngStream& rng, RunOptions options) {
  RngStream init_rng = rng.substream(0);
  OpinionConfig initial = sample_initial(dist, n, init_rng);
  return run_from(std::move(initial), horizon, snapshot_times, rng.substream(1), options);
}

CompleteGraphRun replay(OpinionConfig initial, const EventLog& log, double horizon,
                        const std::vector<double>& snapshot_times) {
  if (horizon > log.horizon) {
    throw Error(Errc::replay, "log covers [0, " + std::to_string(log.horizon) + "] only");
  }
  EventLogCursor source(log);
  return drive(std::move(initial), horizon, snapshot_times, source, false);
}

XjStatistic xj_counts(const CompleteGraphRun& run, double t) {
  const auto& snap = run.snapshot_at(t);
  XjStatistic stat;
  stat.t = t;
  stat.n = snap.xi.size();
  const std::int64_t top = snap.xi.size() > 0 ? snap.xi.maxCoeff() : 0;
  stat.counts.assign(static_cast<std::size_t>(top + 1), 0);
  for (Index x = 0; x < snap.xi.size(); ++x) ++stat.counts[static_cast<std::size_t>(snap.xi(x))];
  return stat;
}

double expected_xj(Index n, double t, int j) {
  if (n < 1 || t < 0.0 || j < 0) throw Error(Errc::invalid_config, "expected_xj needs n >= 1, t >= 0, j >= 0");
  const double nn = static_cast<double>(n);
  const double rate = 2.0 * t * (1.0 - 1.0 / (2.0 * nn));
  if (rate == 0.0) return j == 0 ? nn : 0.0;
  return nn * std::exp(j * std::log(rate) - std::lgamma(j + 1.0) - rate);
}

PerturbedReplay perturbed_replay(const OpinionConfig& initial, const EventLog& log, Index x, double delta, double t) {
  if (t > log.horizon) {
    throw Error(Errc::replay, "log covers [0, " + std::to_string(log.horizon) + "] only");
  }
  EventLogCursor source(log);
  return replay_pair(initial, source, x, delta, t);
}

PerturbedReplay perturbed_replay(const OpinionConfig& initial, const RngStream& events, Index x, double delta,
                                 double t) {
  EventStream source(initial.n_vertices(), events);
  return replay_pair(initial, source, x, delta, t);
}

double sample_mean(const OpinionConfig& config) { return config.opinions.mean(); }

double sample_variance(const OpinionConfig& config) {
  const double mean = config.opinions.mean();
  return (config.opinions.array() - mean).square().mean();
}

}  // namespace gossip
