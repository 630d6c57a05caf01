#include "gossip/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gossip {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_vertex: return "invalid vertex";
    case Errc::invalid_distribution: return "invalid distribution";
    case Errc::invalid_schedule: return "invalid schedule";
    case Errc::missing_snapshot: return "missing snapshot";
    case Errc::replay: return "replay error";
    case Errc::instability: return "instability";
    case Errc::undefined_moment: return "undefined moment";
    case Errc::size_cap: return "size cap exceeded";
    case Errc::invalid_measure: return "invalid measure";
    case Errc::alignment: return "alignment error";
    case Errc::invalid_config: return "invalid config";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

OpinionConfig apply_average(OpinionConfig config, Index x, Index y) {
  apply_average_inplace(config.opinions, x, y);
  return config;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_distribution, what); }

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    bad("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) bad("not a finite number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

InitialDistribution InitialDistribution::point_mass(double c) {
  if (!std::isfinite(c)) bad("point mass location must be finite");
  return {Kind::point_mass, {c}};
}

InitialDistribution InitialDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) bad("bernoulli parameter must lie in [0, 1]");
  return {Kind::bernoulli, {p}};
}

InitialDistribution InitialDistribution::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) bad("uniform needs finite a < b");
  return {Kind::uniform, {a, b}};
}

InitialDistribution InitialDistribution::linear_2x() { return {Kind::linear_2x, {}}; }

InitialDistribution InitialDistribution::cauchy(double scale) {
  if (!(scale > 0.0 && std::isfinite(scale))) bad("cauchy scale must be positive");
  return {Kind::cauchy, {scale}};
}

InitialDistribution InitialDistribution::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) bad("piecewise density needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [x, y] = knots[i];
    if (!std::isfinite(x) || !std::isfinite(y) || y < 0.0) bad("knots must be finite with density >= 0");
    if (i > 0 && !(x > knots[i - 1].first)) bad("knot positions must be strictly increasing");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    total += 0.5 * (knots[i].second + knots[i - 1].second) * (knots[i].first - knots[i - 1].first);
  }
  if (!(total > 0.0)) bad("piecewise density is not normalizable (zero integral)");

  InitialDistribution dist(Kind::piecewise_linear, {});
  for (auto& knot : knots) knot.second /= total;
  dist.knot_cdf_.assign(knots.size(), 0.0);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    dist.knot_cdf_[i] = dist.knot_cdf_[i - 1] +
                        0.5 * (knots[i].second + knots[i - 1].second) * (knots[i].first - knots[i - 1].first);
  }
  dist.knot_cdf_.back() = 1.0;
  dist.knots_ = std::move(knots);
  return dist;
}

InitialDistribution InitialDistribution::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto args = split(rest, ',');

  auto expect = [&](std::size_t count) {
    if (args.size() != count) bad("'" + name + "' expects " + std::to_string(count) + " parameter(s)");
  };
  if (name == "point") {
    expect(1);
    return point_mass(parse_number(args[0]));
  }
  if (name == "ber" || name == "bernoulli") {
    expect(1);
    return bernoulli(parse_number(args[0]));
  }
  if (name == "uniform") {
    expect(2);
    return uniform(parse_number(args[0]), parse_number(args[1]));
  }
  if (name == "linear2x" || name == "linear_2x") {
    if (!rest.empty()) bad("linear2x takes no parameters");
    return linear_2x();
  }
  if (name == "cauchy") {
    expect(1);
    return cauchy(parse_number(args[0]));
  }
  if (name == "piecewise") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& item : args) {
      const auto xy = split(item, ':');
      if (xy.size() != 2) bad("piecewise knots are written x:density");
      knots.emplace_back(parse_number(xy[0]), parse_number(xy[1]));
    }
    return piecewise_linear(std::move(knots));
  }
  bad("unknown distribution '" + text + "'");
}

std::string InitialDistribution::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::point_mass: out << "point:" << params_[0]; break;
    case Kind::bernoulli: out << "ber:" << params_[0]; break;
    case Kind::uniform: out << "uniform:" << params_[0] << ',' << params_[1]; break;
    case Kind::linear_2x: out << "linear2x"; break;
    case Kind::cauchy: out << "cauchy:" << params_[0]; break;
    case Kind::piecewise_linear:
      out << "piecewise:";
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        out << (i ? "," : "") << knots_[i].first << ':' << knots_[i].second;
      }
      break;
  }
  return out.str();
}

std::pair<double, double> InitialDistribution::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::point_mass: return {params_[0], params_[0]};
    case Kind::bernoulli:
      if (params_[0] == 0.0) return {0.0, 0.0};
      if (params_[0] == 1.0) return {1.0, 1.0};
      return {0.0, 1.0};
    case Kind::uniform: return {params_[0], params_[1]};
    case Kind::linear_2x: return {0.0, 1.0};
    case Kind::cauchy: return {-inf, inf};
    case Kind::piecewise_linear: return {knots_.front().first, knots_.back().first};
  }
  return {-inf, inf};
}

double InitialDistribution::support_bound() const {
  const auto [lo, hi] = support();
  return std::max(std::abs(lo), std::abs(hi));
}

std::vector<std::pair<double, double>> InitialDistribution::atoms() const {
  switch (kind_) {
    case Kind::point_mass: return {{params_[0], 1.0}};
    case Kind::bernoulli: return {{0.0, 1.0 - params_[0]}, {1.0, params_[0]}};
    default: throw Error(Errc::invalid_distribution, to_string() + " is not atomic");
  }
}

double InitialDistribution::pdf(double u) const {
  switch (kind_) {
    case Kind::uniform: {
      const double a = params_[0], b = params_[1], height = 1.0 / (b - a);
      if (u > a && u < b) return height;
      if (u == a || u == b) return 0.5 * height;
      return 0.0;
    }
    case Kind::linear_2x:
      if (u >= 0.0 && u < 1.0) return 2.0 * u;
      if (u == 1.0) return 1.0;
      return 0.0;
    case Kind::cauchy: {
      const double a = params_[0];
      return a / (std::numbers::pi * (a * a + u * u));
    }
    case Kind::piecewise_linear: {
      if (u < knots_.front().first || u > knots_.back().first) return 0.0;
      if (u == knots_.front().first) return 0.5 * knots_.front().second;
      if (u == knots_.back().first) return 0.5 * knots_.back().second;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                       [](double v, const auto& knot) { return v < knot.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return y0 + (y1 - y0) * (u - x0) / (x1 - x0);
    }
    default: throw Error(Errc::invalid_distribution, to_string() + " has no density");
  }
}

double InitialDistribution::cdf(double u) const {
  switch (kind_) {
    case Kind::point_mass: return u >= params_[0] ? 1.0 : 0.0;
    case Kind::bernoulli: return u < 0.0 ? 0.0 : (u < 1.0 ? 1.0 - params_[0] : 1.0);
    case Kind::uniform: return std::clamp((u - params_[0]) / (params_[1] - params_[0]), 0.0, 1.0);
    case Kind::linear_2x: return u <= 0.0 ? 0.0 : (u >= 1.0 ? 1.0 : u * u);
    case Kind::cauchy: return 0.5 + std::atan(u / params_[0]) / std::numbers::pi;
    case Kind::piecewise_linear: {
      if (u <= knots_.front().first) return 0.0;
      if (u >= knots_.back().first) return 1.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                       [](double v, const auto& knot) { return v < knot.first; });
      const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
      const auto& [x0, y0] = knots_[i];
      const auto& [x1, y1] = knots_[i + 1];
      const double s = u - x0;
      return knot_cdf_[i] + y0 * s + 0.5 * (y1 - y0) / (x1 - x0) * s * s;
    }
  }
  return 0.0;
}

double InitialDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::point_mass: return params_[0];
    case Kind::bernoulli: return rng.uniform() < params_[0] ? 1.0 : 0.0;
    case Kind::uniform: return params_[0] + (params_[1] - params_[0]) * rng.uniform();
    case Kind::linear_2x: return std::sqrt(rng.uniform());
    case Kind::cauchy: return params_[0] * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
    case Kind::piecewise_linear: {
      const double target = rng.uniform();
      const auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), target);
      std::size_t i = static_cast<std::size_t>(it - knot_cdf_.begin());
      i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
      const auto& [x0, y0] = knots_[i];
      const auto& [x1, y1] = knots_[i + 1];
      const double width = x1 - x0;
      const double slope = (y1 - y0) / width;
      const double need = target - knot_cdf_[i];
      // Solve y0*s + slope*s^2/2 = need for s in [0, width].
      double s;
      if (std::abs(slope) * width < 1e-12 * std::max(y0, 1e-300)) {
        s = y0 > 0.0 ? need / y0 : 0.0;
      } else {
        const double disc = std::max(0.0, y0 * y0 + 2.0 * slope * need);
        s = 2.0 * need / (y0 + std::sqrt(disc));
      }
      return x0 + std::clamp(s, 0.0, width);
    }
  }
  return 0.0;
}

OpinionConfig sample_initial(const InitialDistribution& dist, Index n, RngStream& rng) {
  if (n < 1) throw Error(Errc::invalid_config, "need at least one vertex");
  OpinionConfig config;
  config.opinions.resize(n);
  for (Index i = 0; i < n; ++i) config.opinions(i) = dist.sample(rng);
  config.time = 0.0;
  return config;
}

}  // namespace gossip
