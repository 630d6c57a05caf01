#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <numeric>

#include "gossip/sim_complete.hpp"

using namespace gossip;

TEST_CASE("expected_xj matches high-precision reference values") {
  // N = 1e4, t = 1, computed with 30-digit arithmetic.
  CHECK(expected_xj(10000, 1.0, 0) == doctest::Approx(1353.48817441635325790700081455).epsilon(1e-12));
  CHECK(expected_xj(10000, 1.0, 1) == doctest::Approx(2706.84100001526488048821092901).epsilon(1e-12));
  CHECK(expected_xj(10000, 1.0, 2) == doctest::Approx(2706.70565796526411724418651847).epsilon(1e-12));
  CHECK(expected_xj(10000, 1.0, 3) == doctest::Approx(1804.38021512157723602554953943).epsilon(1e-12));
  CHECK(expected_xj(2, 0.5, 0) == doctest::Approx(0.944733105482029414276093101886584).epsilon(1e-12));
  CHECK(expected_xj(2, 0.5, 2) == doctest::Approx(0.265706185916820772765151184905583).epsilon(1e-12));
  CHECK(expected_xj(100, 0.0, 0) == 100.0);
  CHECK(expected_xj(100, 0.0, 1) == 0.0);
}

TEST_CASE("point mass initial data stays put") {
  const auto r = run(InitialDistribution::point_mass(1.0), 2, 10.0, {0.0, 5.0, 10.0}, RngStream(7, 0));
  for (const auto& s : r.snapshots) CHECK((s.config.opinions.array() == 1.0).all());
  CHECK(r.event_count > 0);
}

TEST_CASE("snapshot schedule validation and lookup") {
  const auto dist = InitialDistribution::bernoulli(0.5);
  CHECK_THROWS_AS(run(dist, 10, 1.0, {0.5, 0.2}, RngStream(1, 0)), Error);
  CHECK_THROWS_AS(run(dist, 10, 1.0, {0.5, 0.5}, RngStream(1, 0)), Error);
  CHECK_THROWS_AS(run(dist, 10, 1.0, {2.0}, RngStream(1, 0)), Error);
  const auto r = run(dist, 10, 1.0, {0.0, 0.25, 1.0}, RngStream(1, 0));
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshot_at(0.25).time == 0.25);
  CHECK(r.snapshot_at(0.0).config.opinions == r.initial.opinions);
  CHECK(r.snapshot_at(1.0).config.opinions == r.config.opinions);
  CHECK((r.snapshot_at(0.0).xi.array() == 0).all());
  try {
    (void)r.snapshot_at(0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_snapshot);
  }
}

TEST_CASE("runs are reproducible and replayable") {
  const auto dist = InitialDistribution::uniform(0.0, 1.0);
  const auto a = run(dist, 50, 2.0, {1.0, 2.0}, RngStream(11, 2), {true});
  const auto b = run(dist, 50, 2.0, {1.0, 2.0}, RngStream(11, 2));
  CHECK(a.config.opinions == b.config.opinions);
  CHECK(a.xi == b.xi);
  REQUIRE(a.events.has_value());
  CHECK(std::int64_t(a.events->events.size()) == a.event_count);

  const auto again = replay(a.initial, *a.events, 2.0, {1.0, 2.0});
  CHECK(again.config.opinions == a.config.opinions);
  CHECK(again.snapshot_at(1.0).config.opinions == a.snapshot_at(1.0).config.opinions);
  CHECK(again.xi == a.xi);
  CHECK_THROWS_AS(replay(a.initial, *a.events, 3.0, {}), Error);

  const auto other = run(dist, 50, 2.0, {2.0}, RngStream(12, 2));
  CHECK(other.config.opinions != a.config.opinions);
}

TEST_CASE("interaction counts bookkeeping") {
  const auto r = run(InitialDistribution::bernoulli(0.5), 200, 1.5, {1.5}, RngStream(4, 0), {true});
  const auto stat = xj_counts(r, 1.5);
  CHECK(std::accumulate(stat.counts.begin(), stat.counts.end(), std::int64_t{0}) == 200);
  std::int64_t attempts = 0;
  for (const auto& e : r.events->events) attempts += e.x == e.y ? 1 : 2;
  CHECK(r.xi.sum() == attempts);
}

TEST_CASE("interaction counts are Poisson(2t(1 - 1/2N)) per vertex (chi-square, alpha = 0.001)") {
  const Index n = 2000;
  const double t = 1.0;
  std::vector<double> observed(8, 0.0);
  const int replicas = 20;
  for (int r = 0; r < replicas; ++r) {
    const auto res = run(InitialDistribution::bernoulli(0.5), n, t, {t}, RngStream(31, std::uint64_t(r)));
    for (Index x = 0; x < n; ++x) observed[std::size_t(std::min<std::int64_t>(res.xi(x), 7))] += 1.0;
  }
  const boost::math::poisson_distribution<> law(2.0 * t * (1.0 - 1.0 / (2.0 * double(n))));
  const double total = double(n) * replicas;
  double chi2 = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double p = j < 7 ? boost::math::pdf(law, j) : boost::math::cdf(boost::math::complement(law, 6));
    chi2 += (observed[std::size_t(j)] - total * p) * (observed[std::size_t(j)] - total * p) / (total * p);
  }
  const double critical = boost::math::quantile(boost::math::chi_squared_distribution<>(7), 0.999);
  CHECK(chi2 < critical);
}

TEST_CASE("variance of three vertices: generator identity L Var = -Var") {
  RngStream rng(8, 0);
  for (int trial = 0; trial < 20; ++trial) {
    OpinionConfig c{Eigen::Vector3d(rng.uniform(), rng.uniform() * 4 - 2, rng.uniform() * 10), 0.0};
    const double var = sample_variance(c);
    // Generator of the rate-N clock over the N^2 ordered pairs: each ordered pair fires at rate 1/N.
    double lv = 0.0;
    for (Index x = 0; x < 3; ++x) {
      for (Index y = 0; y < 3; ++y) lv += (sample_variance(apply_average(c, x, y)) - var) / 3.0;
    }
    CHECK(lv == doctest::Approx(-var).epsilon(1e-12));
  }
}

TEST_CASE("three-vertex mean variance decays like exp(-t)") {
  const OpinionConfig c{Eigen::Vector3d(0.0, 1.0, 5.0), 0.0};
  const double t = 0.7;
  const int replicas = 40000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const auto res = run_from(c, t, {}, RngStream(99, std::uint64_t(r)));
    const double v = sample_variance(res.config);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / replicas;
  const double se = std::sqrt((sum2 / replicas - mean * mean) / replicas);
  CHECK(std::abs(mean - sample_variance(c) * std::exp(-t)) < 4.0 * se);
}

TEST_CASE("perturbation propagates with weight at least 2^-j") {
  RngStream init(5, 0);
  const auto initial = sample_initial(InitialDistribution::uniform(-1.0, 1.0), 30, init);
  for (int k = 0; k < 200; ++k) {
    const double delta = k % 2 ? -0.25 : 0.25;
    const auto p = perturbed_replay(initial, RngStream(500 + std::uint64_t(k), 1), Index(k % 30), delta, 1.0);
    const double bound = std::ldexp(delta, -int(p.j));
    if (delta > 0) {
      CHECK(p.difference >= bound);
    } else {
      CHECK(p.difference <= bound);
    }
    CHECK(std::abs(p.perturbed - p.original - p.difference) < 1e-14);
  }
  CHECK_THROWS_AS(perturbed_replay(initial, RngStream(1, 1), 30, 0.1, 1.0), Error);
}

TEST_CASE("perturbed replay from a recorded log agrees with the stream") {
  RngStream init(6, 0);
  const auto initial = sample_initial(InitialDistribution::uniform(0.0, 1.0), 20, init);
  const auto rec = run_from(initial, 1.0, {}, RngStream(6, 1), {true});
  const auto from_log = perturbed_replay(initial, *rec.events, 3, 0.1, 1.0);
  const auto from_stream = perturbed_replay(initial, RngStream(6, 1), 3, 0.1, 1.0);
  CHECK(from_log.original == from_stream.original);
  CHECK(from_log.perturbed == from_stream.perturbed);
  CHECK(from_log.j == from_stream.j);
  CHECK(from_log.original == rec.config.opinions(3));
}

TEST_CASE("sample moments") {
  const OpinionConfig c{Eigen::Vector4d(1.0, 2.0, 3.0, 4.0), 0.0};
  CHECK(sample_mean(c) == 2.5);
  CHECK(sample_variance(c) == 1.25);
}
