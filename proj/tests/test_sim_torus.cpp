#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gossip/sim_torus.hpp"

using namespace gossip;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("sine initial data has zero mean") {
  const auto c = init_from_profile(FourierProfile::sine(1, 1), 256, 1);
  CHECK(c.site_count() == 256);
  CHECK(std::abs(c.opinions.mean()) <= 1e-12);
  CHECK(c.opinions(64) == doctest::Approx(1.0));
}

TEST_CASE("lattice indexing wraps around") {
  const auto c = init_from_profile(FourierProfile::constant(2, 1.0), 4, 2);
  CHECK(c.site_count() == 16);
  CHECK(c.coordinates(6) == std::vector<Index>{2, 1});
  CHECK(c.neighbor(3, 0) == 0);
  CHECK(c.neighbor(3, 1) == 7);
  CHECK(c.neighbor(15, 1) == 3);
}

TEST_CASE("profile parsing and evaluation") {
  const auto p = FourierProfile::parse("0.5*sin1+cos2+const:3", 1);
  for (double u : {0.0, 0.1, 0.37, 0.8}) {
    CHECK(p(u) == doctest::Approx(0.5 * std::sin(2 * pi * u) + std::cos(4 * pi * u) + 3.0));
  }
  CHECK(p.max_frequency() == 2);
  CHECK(p.is_real());
  CHECK(p.coefficient(Eigen::VectorXi::Constant(1, 1)) == std::complex<double>(0.0, -0.25));
  CHECK_THROWS_AS(FourierProfile::parse("tan1", 1), Error);
  CHECK_THROWS_AS(FourierProfile::parse("sinx", 1), Error);
  const auto q = FourierProfile::cosine(2, 1, 1);
  CHECK(q.evaluate(Eigen::Vector2d(0.3, 0.25)) == doctest::Approx(0.0));
}

TEST_CASE("heat pairing decays each mode by exp(-2 pi^2 |k|^2 t)") {
  const auto s1 = FourierProfile::sine(1, 1), c1 = FourierProfile::cosine(1, 1), s2 = FourierProfile::sine(1, 2);
  CHECK(heat_pairing(s1, s1, 0.0) == doctest::Approx(0.5));
  CHECK(heat_pairing(s1, s1, 0.05) == doctest::Approx(0.5 * std::exp(-2 * pi * pi * 0.05)));
  CHECK(std::abs(heat_pairing(s1, c1, 0.05)) < 1e-15);
  CHECK(heat_pairing(s2, s2, 0.01) == doctest::Approx(0.5 * std::exp(-8 * pi * pi * 0.01)));
  const auto two = FourierProfile::sine(2, 1);
  CHECK(heat_pairing(two, two, 0.1) == doctest::Approx(0.5 * std::exp(-2 * pi * pi * 0.1)));
}

TEST_CASE("lattice pairing at time zero") {
  const auto s1 = FourierProfile::sine(1, 1);
  const auto c = init_from_profile(s1, 128, 1);
  CHECK(pair(weighted_empirical(c), s1) == doctest::Approx(0.5).epsilon(1e-12));
  const auto mu = weighted_empirical(c).as_empirical();
  CHECK(mu.size() == 128);
  CHECK(mu.values(32) == doctest::Approx(0.25));
}

TEST_CASE("torus dynamics conserve the sum and shrink the range") {
  for (int d : {1, 2}) {
    const auto p = FourierProfile::parse(d == 1 ? "sin1+cos3" : "sin1", d);
    const Index n = d == 1 ? 32 : 8;
    const auto c = init_from_profile(p, n, d);
    const auto r = run_torus(c, 0.05, {0.0, 0.05}, RngStream(3, 0));
    REQUIRE(r.snapshots.size() == 2);
    CHECK(std::abs(r.config.opinions.sum() - c.opinions.sum()) < 1e-12);
    CHECK(r.config.opinions.maxCoeff() <= c.opinions.maxCoeff());
    CHECK(r.config.opinions.minCoeff() >= c.opinions.minCoeff());
    CHECK(r.snapshots.front().opinions == c.opinions);
    // Poisson number of events with mean d n^d n^2 t.
    double sites = 1.0;
    for (int a = 0; a < d; ++a) sites *= double(n);
    const double mean = d * sites * double(n * n) * 0.05;
    CHECK(std::abs(double(r.event_count) - mean) < 5.0 * std::sqrt(mean));
  }
}

TEST_CASE("torus runs are reproducible") {
  const auto c = init_from_profile(FourierProfile::sine(1, 1), 16, 1);
  const auto a = run_torus(c, 0.1, {0.1}, RngStream(4, 1));
  const auto b = run_torus(c, 0.1, {0.1}, RngStream(4, 1));
  const auto other = run_torus(c, 0.1, {0.1}, RngStream(4, 2));
  CHECK(a.config.opinions == b.config.opinions);
  CHECK(a.event_count == b.event_count);
  CHECK(a.config.opinions != other.config.opinions);
}

TEST_CASE("invalid torus setups") {
  CHECK_THROWS_AS(init_from_profile(FourierProfile::sine(1, 1), 1, 1), Error);
  CHECK_THROWS_AS(init_from_profile(FourierProfile::sine(2, 1), 8, 1), Error);
}
