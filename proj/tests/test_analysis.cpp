#include <doctest.h>

#include <cmath>

#include "gossip/analysis.hpp"
#include "gossip/io.hpp"
#include "gossip/limit_pde.hpp"
#include "gossip/sim_complete.hpp"

using namespace gossip;

namespace {

EmpiricalMeasure random_measure(Index n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return EmpiricalMeasure::from_opinions(sample_initial(InitialDistribution::uniform(-1.0, 2.0), n, rng).opinions);
}

double brute_force(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const TestFunction& g, double t) {
  double s = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    for (Index j = 0; j < nu.size(); ++j) s += mu.weights(i) * nu.weights(j) * g.evaluate(t, 0.5 * (mu.values(i) + nu.values(j)));
  }
  return s;
}

}  // namespace

TEST_CASE("pairing with polynomial test functions") {
  const auto mu = EmpiricalMeasure::from_opinions(Eigen::Vector4d(0.0, 1.0, 2.0, 5.0));
  CHECK(mu.normalized);
  CHECK(pair(mu, TestFunction::constant(3.0), 0.0) == doctest::Approx(3.0));
  CHECK(pair(mu, TestFunction::identity(), 0.0) == doctest::Approx(2.0));
  CHECK(pair(mu, TestFunction::square(), 0.0) == doctest::Approx(7.5));
  const auto cosine = TestFunction::stationary([](double u) { return std::cos(u); }, "cos");
  CHECK(cosine.time_derivative(1.0, 2.0) == 0.0);
}

TEST_CASE("exact convolution pairing matches brute force") {
  const auto mu = random_measure(60, 1), nu = random_measure(45, 2);
  const auto g = TestFunction::stationary([](double u) { return std::sin(3.0 * u) + u * u; }, "g");
  CHECK(pair_convolution(mu, nu, g, 0.0, ConvMethod::exact()) == doctest::Approx(brute_force(mu, nu, g, 0.0)).epsilon(1e-12));
  CHECK(pair_convolution(mu, g, 0.0, ConvMethod::exact()) == doctest::Approx(brute_force(mu, mu, g, 0.0)).epsilon(1e-12));
  const auto copy = mu;
  CHECK(pair_convolution(mu, copy, g, 0.0, ConvMethod::exact()) ==
        doctest::Approx(pair_convolution(mu, g, 0.0, ConvMethod::exact())).epsilon(1e-12));
}

TEST_CASE("convolution pairing is bilinear in the weights") {
  const auto mu1 = random_measure(30, 3), mu2 = random_measure(30, 4), nu = random_measure(25, 5);
  EmpiricalMeasure mix;
  mix.values.resize(60);
  mix.weights.resize(60);
  mix.values << mu1.values, mu2.values;
  mix.weights << 2.0 * mu1.weights, -0.5 * mu2.weights;
  const auto g = TestFunction::stationary([](double u) { return std::exp(-u * u); }, "gauss");
  for (const auto& method : {ConvMethod::exact(), ConvMethod::binned(64)}) {
    const double lhs = pair_convolution(mix, nu, g, 0.0, method);
    const double rhs = 2.0 * pair_convolution(mu1, nu, g, 0.0, ConvMethod::exact()) -
                       0.5 * pair_convolution(mu2, nu, g, 0.0, ConvMethod::exact());
    CAPTURE(method.to_string());
    CHECK(lhs == doctest::Approx(rhs).epsilon(method.kind() == ConvMethod::Kind::exact ? 1e-12 : 1e-3));
  }
}

TEST_CASE("binned and subsampled pairings approximate the exact one") {
  const auto mu = random_measure(3000, 6);
  const auto exact_sq = pair_convolution(mu, TestFunction::square(), 0.0, ConvMethod::exact());
  const auto binned_sq = pair_convolution(mu, TestFunction::square(), 0.0, ConvMethod::binned(512));
  CHECK(binned_sq == doctest::Approx(exact_sq).epsilon(1e-4));
  // Bins sit at the mean of their values, so linear test functions are reproduced exactly.
  const auto exact_lin = pair_convolution(mu, TestFunction::identity(), 0.0, ConvMethod::exact());
  CHECK(std::abs(pair_convolution(mu, TestFunction::identity(), 0.0, ConvMethod::binned(7)) - exact_lin) < 1e-12);
  const double sub = pair_convolution(mu, TestFunction::square(), 0.0, ConvMethod::subsample(200000, RngStream(3, 0)));
  CHECK(sub == doctest::Approx(exact_sq).epsilon(2e-2));
}

TEST_CASE("conv method selection and parsing") {
  CHECK(ConvMethod::automatic(1000).kind() == ConvMethod::Kind::exact);
  CHECK(ConvMethod::automatic(100000).kind() == ConvMethod::Kind::binned);
  CHECK(ConvMethod::automatic(100000).count() == 4096);
  CHECK(ConvMethod::parse("binned:128").count() == 128);
  CHECK(ConvMethod::parse("subsample:500:9").rng().seed() == 9);
  CHECK(ConvMethod::parse(ConvMethod::binned(33).to_string()).count() == 33);
  CHECK_THROWS_AS(ConvMethod::parse("fancy"), Error);
  const auto big = random_measure(ConvMethod::exact_cap + 1, 7);
  try {
    pair_convolution(big, TestFunction::square(), 0.0, ConvMethod::exact());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::size_cap);
  }
}

TEST_CASE("empirical CDFs are right-continuous steps") {
  const auto mu = EmpiricalMeasure::from_opinions(Eigen::Vector4d(0.0, 1.0, 1.0, 3.0));
  const auto c = Cdf::of(mu);
  CHECK(c(-1.0) == 0.0);
  CHECK(c(0.0) == 0.25);
  CHECK(c(0.5) == 0.25);
  CHECK(c(1.0) == 0.75);
  CHECK(c(2.999) == 0.75);
  CHECK(c(3.0) == 1.0);
  CHECK(c(10.0) == 1.0);
  EmpiricalMeasure signed_mu = mu;
  signed_mu.weights(0) = -0.25;
  CHECK_THROWS_AS(Cdf::of(signed_mu), Error);
}

TEST_CASE("Wasserstein-1 distances with known values") {
  const auto at = [](double v) { return EmpiricalMeasure::from_atoms({{v, 1.0}}); };
  CHECK(wasserstein1(Cdf::of(at(0.0)), Cdf::of(at(0.7))) == doctest::Approx(0.7));
  const auto mu = random_measure(500, 8);
  CHECK(wasserstein1(Cdf::of(mu), Cdf::of(mu)) == 0.0);
  const auto uniform = Cdf::tabulate([](double u) { return u; }, 0.0, 1.0, 3);
  CHECK(wasserstein1(Cdf::of(at(0.5)), uniform) == doctest::Approx(0.25));
  CHECK(wasserstein1(at(0.0), uniform) == doctest::Approx(0.5));
  // Symmetric and a metric on shifted copies.
  const auto shifted = EmpiricalMeasure::from_opinions(mu.values.array() + 0.3);
  CHECK(wasserstein1(Cdf::of(mu), Cdf::of(shifted)) == doctest::Approx(0.3));
  CHECK(wasserstein1(Cdf::of(shifted), Cdf::of(mu)) == doctest::Approx(0.3));
  const auto half = EmpiricalMeasure::from_atoms({{0.0, 0.5}});
  CHECK_THROWS_AS(wasserstein1(half, uniform), Error);
}

TEST_CASE("density CDFs and the empirical distance shrink with sample size") {
  const auto grid = DensityGrid<double>::from_distribution(InitialDistribution::linear_2x(), 2.0, 2048);
  const auto ref = Cdf::from_density(grid.node(0), grid.spacing(), grid.values);
  CHECK(ref(0.5) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(ref.f().back() == 1.0);
  std::vector<double> distances;
  for (Index n : {100, 10000}) {
    RngStream rng(10, 0);
    const auto c = sample_initial(InitialDistribution::linear_2x(), n, rng);
    distances.push_back(wasserstein1(EmpiricalMeasure::from_opinions(c.opinions), ref));
  }
  CHECK(distances[1] < distances[0]);
  CHECK(distances[1] < 0.01);
}

TEST_CASE("martingale residual of a linear test function vanishes") {
  const auto r = run(InitialDistribution::uniform(0.0, 1.0), 500, 1.0, even_schedule(1.0, 11), RngStream(2, 0));
  std::vector<TimedMeasure> snaps;
  for (const auto& s : r.snapshots) snaps.push_back({s.time, EmpiricalMeasure::from_opinions(s.config.opinions)});
  for (const auto& res : martingale_residual(snaps, TestFunction::identity(), ConvMethod::exact())) {
    CHECK(std::abs(res.value) < 1e-12);
  }
  const auto sq = martingale_residual(snaps, TestFunction::square(), ConvMethod::exact());
  CHECK(sq.front().value == 0.0);
  CHECK(sq.size() == 11);
  for (const auto& res : sq) CHECK(std::abs(res.value) < 0.05);
  snaps.resize(2);
  CHECK_THROWS_AS(martingale_residual(snaps, TestFunction::square(), ConvMethod::exact()), Error);
}

TEST_CASE("weak form of the limit equation holds along the density solver") {
  const auto g0 = DensityGrid<double>::from_distribution(InitialDistribution::linear_2x(), 2.0, 1024);
  const double t = 0.3, eps = 1e-3;
  const auto out = integrate(g0, 5e-4, t + eps, {t - eps, t, t + eps});
  const auto g = TestFunction::stationary([](double u) { return std::cos(3.0 * u); }, "cos3");
  auto as_measure = [](const DensityGrid<double>& grid) {
    std::vector<std::pair<double, double>> atoms;
    const auto w = trapezoid_weights<double>(grid.size());
    for (Index i = 0; i < grid.size(); ++i) atoms.emplace_back(grid.node(i), grid.spacing() * w(i) * grid.values(i));
    return EmpiricalMeasure::from_atoms(atoms);
  };
  const auto before = as_measure(out[0]), now = as_measure(out[1]), after = as_measure(out[2]);
  const double derivative = (pair(after, g, 0.0) - pair(before, g, 0.0)) / (2.0 * eps);
  const double drift = 2.0 * (pair_convolution(now, g, 0.0, ConvMethod::exact()) - pair(now, g, 0.0));
  CHECK(derivative == doctest::Approx(drift).epsilon(1e-4));
}
