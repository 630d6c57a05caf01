#include "gossip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gossip {

EmpiricalMeasure EmpiricalMeasure::from_opinions(const Eigen::VectorXd& opinions) {
  const Index n = opinions.size();
  if (n == 0) throw Error(Errc::invalid_measure, "empty configuration");
  return {opinions, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), true};
}

EmpiricalMeasure EmpiricalMeasure::from_atoms(const std::vector<std::pair<double, double>>& atoms) {
  EmpiricalMeasure mu;
  mu.values.resize(static_cast<Index>(atoms.size()));
  mu.weights.resize(static_cast<Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    mu.values(static_cast<Index>(i)) = atoms[i].first;
    mu.weights(static_cast<Index>(i)) = atoms[i].second;
  }
  mu.normalized = std::abs(mu.weights.sum() - 1.0) <= 1e-12 && (mu.weights.array() >= 0.0).all();
  return mu;
}

TestFunction TestFunction::constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return 0.0; }, "const"};
}

TestFunction TestFunction::identity() {
  return {[](double, double u) { return u; }, [](double, double) { return 0.0; }, "u"};
}

TestFunction TestFunction::square() {
  return {[](double, double u) { return u * u; }, [](double, double) { return 0.0; }, "u^2"};
}

TestFunction TestFunction::stationary(std::function<double(double)> g, std::string name) {
  return {[g = std::move(g)](double, double u) { return g(u); }, [](double, double) { return 0.0; },
          std::move(name)};
}

double pair(const EmpiricalMeasure& mu, const TestFunction& g, double t) {
  double sum = 0.0;
  for (Index i = 0; i < mu.size(); ++i) sum += mu.weights(i) * g.evaluate(t, mu.values(i));
  return sum;
}

ConvMethod ConvMethod::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 1 && parts[0] == "exact") return exact();
    if (parts.size() == 2 && parts[0] == "binned") return binned(std::stol(parts[1]));
    if (parts.size() == 3 && parts[0] == "subsample") {
      return subsample(std::stol(parts[1]), RngStream(std::stoull(parts[2]), 0));
    }
  } catch (const std::exception&) {
  }
  throw Error(Errc::invalid_config, "unknown convolution method '" + text + "'");
}

std::string ConvMethod::to_string() const {
  switch (kind_) {
    case Kind::exact: return "exact";
    case Kind::binned: return "binned:" + std::to_string(count_);
    case Kind::subsample: return "subsample:" + std::to_string(count_) + ":" + std::to_string(rng_.seed());
  }
  return "?";
}

namespace {

struct Bin {
  double position;
  double weight;
};

/// Histogram into equal-width bins on [lo, hi]; each bin sits at the |w|-weighted mean of its values.
std::vector<Bin> histogram(const EmpiricalMeasure& mu, double lo, double hi, Index bins) {
  std::vector<double> weight(static_cast<std::size_t>(bins), 0.0), abs_weight(weight), moment(weight);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (Index i = 0; i < mu.size(); ++i) {
    Index b = width > 0.0 ? static_cast<Index>((mu.values(i) - lo) / width) : 0;
    b = std::clamp<Index>(b, 0, bins - 1);
    const auto k = static_cast<std::size_t>(b);
    weight[k] += mu.weights(i);
    abs_weight[k] += std::abs(mu.weights(i));
    moment[k] += std::abs(mu.weights(i)) * mu.values(i);
  }
  std::vector<Bin> out;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (abs_weight[k] > 0.0) out.push_back({moment[k] / abs_weight[k], weight[k]});
  }
  return out;
}

std::vector<double> cumulative_abs(const EmpiricalMeasure& mu) {
  std::vector<double> cum(static_cast<std::size_t>(mu.size()));
  double running = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    running += std::abs(mu.weights(i));
    cum[static_cast<std::size_t>(i)] = running;
  }
  return cum;
}

Index draw_index(const std::vector<double>& cum, RngStream& rng) {
  const double target = rng.uniform() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  return std::min<Index>(static_cast<Index>(it - cum.begin()), static_cast<Index>(cum.size()) - 1);
}

}  // namespace

double pair_convolution(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const TestFunction& g, double t,
                        const ConvMethod& method) {
  if (mu.size() == 0 || nu.size() == 0) return 0.0;
  const auto& G = g.evaluate;
  switch (method.kind()) {
    case ConvMethod::Kind::exact: {
      if (mu.size() > ConvMethod::exact_cap || nu.size() > ConvMethod::exact_cap) {
        throw Error(Errc::size_cap, "exact convolution pairing limited to " + std::to_string(ConvMethod::exact_cap) +
                                        " atoms; use binned or subsample");
      }
      double sum = 0.0;
      if (&mu == &nu) {
        for (Index i = 0; i < mu.size(); ++i) {
          double row = 0.0;
          for (Index j = i + 1; j < mu.size(); ++j) row += mu.weights(j) * G(t, 0.5 * (mu.values(i) + mu.values(j)));
          sum += mu.weights(i) * (2.0 * row + mu.weights(i) * G(t, mu.values(i)));
        }
        return sum;
      }
      for (Index i = 0; i < mu.size(); ++i) {
        double row = 0.0;
        for (Index j = 0; j < nu.size(); ++j) row += nu.weights(j) * G(t, 0.5 * (mu.values(i) + nu.values(j)));
        sum += mu.weights(i) * row;
      }
      return sum;
    }
    case ConvMethod::Kind::binned: {
      if (method.count() < 1) throw Error(Errc::invalid_config, "binned pairing needs at least one bin");
      const double lo = std::min(mu.values.minCoeff(), nu.values.minCoeff());
      const double hi = std::max(mu.values.maxCoeff(), nu.values.maxCoeff());
      const auto a = histogram(mu, lo, hi, method.count());
      const auto b = &mu == &nu ? a : histogram(nu, lo, hi, method.count());
      double sum = 0.0;
      for (const auto& x : a) {
        double row = 0.0;
        for (const auto& y : b) row += y.weight * G(t, 0.5 * (x.position + y.position));
        sum += x.weight * row;
      }
      return sum;
    }
    case ConvMethod::Kind::subsample: {
      if (method.count() < 1) throw Error(Errc::invalid_config, "subsample pairing needs at least one pair");
      RngStream rng = method.rng();
      const auto cum_mu = cumulative_abs(mu);
      const auto cum_nu = cumulative_abs(nu);
      double sum = 0.0;
      for (Index k = 0; k < method.count(); ++k) {
        const Index i = draw_index(cum_mu, rng);
        const Index j = draw_index(cum_nu, rng);
        const double sign = (mu.weights(i) < 0.0) != (nu.weights(j) < 0.0) ? -1.0 : 1.0;
        sum += sign * G(t, 0.5 * (mu.values(i) + nu.values(j)));
      }
      return cum_mu.back() * cum_nu.back() * sum / static_cast<double>(method.count());
    }
  }
  return 0.0;
}

double pair_convolution(const EmpiricalMeasure& mu, const TestFunction& g, double t, const ConvMethod& method) {
  return pair_convolution(mu, mu, g, t, method);
}

Cdf::Cdf(std::vector<double> x, std::vector<double> f) : x_(std::move(x)), f_(std::move(f)) {
  if (x_.empty() || x_.size() != f_.size()) throw Error(Errc::invalid_measure, "CDF needs matching, non-empty knots");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(f_[i])) throw Error(Errc::invalid_measure, "CDF knots must be finite");
    if (i > 0 && (x_[i] < x_[i - 1] || f_[i] < f_[i - 1] - 1e-12)) {
      throw Error(Errc::invalid_measure, "CDF knots must be nondecreasing");
    }
  }
}

Cdf Cdf::of(const EmpiricalMeasure& mu) {
  if (mu.size() == 0) throw Error(Errc::invalid_measure, "empty measure");
  if ((mu.weights.array() < 0.0).any()) throw Error(Errc::invalid_measure, "CDF of a signed measure");
  std::vector<Index> order(static_cast<std::size_t>(mu.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return mu.values(a) < mu.values(b); });
  std::vector<double> x, f;
  double running = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double v = mu.values(order[k]);
    x.push_back(v);
    f.push_back(running);
    while (k < order.size() && mu.values(order[k]) == v) running += mu.weights(order[k++]);
    x.push_back(v);
    f.push_back(running);
  }
  return Cdf(std::move(x), std::move(f));
}

Cdf Cdf::from_density(double first_node, double spacing, const Eigen::VectorXd& density) {
  const Index n = density.size();
  if (n < 2 || !(spacing > 0.0)) throw Error(Errc::invalid_measure, "density needs two nodes and positive spacing");
  std::vector<double> x(static_cast<std::size_t>(n)), f(static_cast<std::size_t>(n));
  double running = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (i > 0) running += 0.5 * spacing * (std::max(density(i - 1), 0.0) + std::max(density(i), 0.0));
    x[static_cast<std::size_t>(i)] = first_node + static_cast<double>(i) * spacing;
    f[static_cast<std::size_t>(i)] = running;
  }
  if (!(running > 0.0)) throw Error(Errc::invalid_measure, "density has zero mass");
  for (auto& value : f) value /= running;
  return Cdf(std::move(x), std::move(f));
}

Cdf Cdf::tabulate(const std::function<double(double)>& cdf, double lo, double hi, Index count) {
  if (count < 2 || !(hi > lo)) throw Error(Errc::invalid_measure, "tabulation needs lo < hi and two points");
  std::vector<double> x(static_cast<std::size_t>(count)), f(x.size());
  for (Index i = 0; i < count; ++i) {
    x[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    f[static_cast<std::size_t>(i)] = std::clamp(cdf(x[static_cast<std::size_t>(i)]), 0.0, 1.0);
  }
  return Cdf(std::move(x), std::move(f));
}

namespace {

double right_limit(const Cdf& c, double u) {
  const auto& x = c.x();
  const auto& f = c.f();
  const auto it = std::upper_bound(x.begin(), x.end(), u);
  if (it == x.begin()) return 0.0;
  const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
  if (i + 1 == x.size()) return f.back();
  return f[i] + (f[i + 1] - f[i]) * (u - x[i]) / (x[i + 1] - x[i]);
}

double left_limit(const Cdf& c, double u) {
  const auto& x = c.x();
  const auto& f = c.f();
  const auto it = std::lower_bound(x.begin(), x.end(), u);
  if (it == x.begin()) return 0.0;
  if (it == x.end()) return f.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  return f[i - 1] + (f[i] - f[i - 1]) * (u - x[i - 1]) / (x[i] - x[i - 1]);
}

double abs_linear_integral(double d0, double d1, double width) {
  if ((d0 >= 0.0) == (d1 >= 0.0) || d0 == 0.0 || d1 == 0.0) return 0.5 * (std::abs(d0) + std::abs(d1)) * width;
  return 0.5 * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1)) * width;
}

}  // namespace

double Cdf::operator()(double u) const { return right_limit(*this, u); }

double wasserstein1(const Cdf& a, const Cdf& b) {
  if (std::abs(a.f().back() - 1.0) > 1e-9 || std::abs(b.f().back() - 1.0) > 1e-9) {
    throw Error(Errc::invalid_measure, "both CDFs must reach 1");
  }
  std::vector<double> breaks;
  breaks.reserve(a.x().size() + b.x().size());
  std::merge(a.x().begin(), a.x().end(), b.x().begin(), b.x().end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double p = breaks[k], q = breaks[k + 1];
    total += abs_linear_integral(right_limit(a, p) - right_limit(b, p), left_limit(a, q) - left_limit(b, q), q - p);
  }
  return total;
}

double wasserstein1(const EmpiricalMeasure& mu, const Cdf& reference) {
  if ((mu.weights.array() < 0.0).any() || std::abs(mu.total_weight() - 1.0) > 1e-9) {
    throw Error(Errc::invalid_measure, "Wasserstein distance needs a probability measure");
  }
  return wasserstein1(Cdf::of(mu), reference);
}

std::vector<Residual> martingale_residual(const std::vector<TimedMeasure>& snapshots, const TestFunction& g,
                                          const ConvMethod& method) {
  if (snapshots.size() < 3) throw Error(Errc::invalid_schedule, "residual needs at least three snapshots");
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    if (!(snapshots[k].t > snapshots[k - 1].t)) throw Error(Errc::invalid_schedule, "snapshots must be time-ordered");
  }
  const TestFunction dg{g.time_derivative, g.time_derivative, g.name + "_t"};
  auto drift = [&](const TimedMeasure& s) {
    return 2.0 * (pair_convolution(s.measure, g, s.t, method) - pair(s.measure, g, s.t)) + pair(s.measure, dg, s.t);
  };
  const double start = pair(snapshots.front().measure, g, snapshots.front().t);
  std::vector<Residual> out;
  out.reserve(snapshots.size());
  double integral = 0.0;
  double previous_drift = drift(snapshots.front());
  out.push_back({snapshots.front().t, 0.0});
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    const double current = drift(snapshots[k]);
    integral += 0.5 * (snapshots[k].t - snapshots[k - 1].t) * (previous_drift + current);
    previous_drift = current;
    out.push_back({snapshots[k].t, pair(snapshots[k].measure, g, snapshots[k].t) - start - integral});
  }
  return out;
}

}  // namespace gossip
