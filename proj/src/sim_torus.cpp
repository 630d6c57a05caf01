#include "gossip/sim_torus.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gossip {

std::vector<Index> TorusConfig::coordinates(Index site) const {
  std::vector<Index> coords(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    coords[static_cast<std::size_t>(a)] = site % side;
    site /= side;
  }
  return coords;
}

Index TorusConfig::neighbor(Index site, int axis) const {
  Index stride = 1;
  for (int a = 0; a < axis; ++a) stride *= side;
  const Index coord = (site / stride) % side;
  return coord + 1 == side ? site - coord * stride : site + stride;
}

FourierProfile FourierProfile::constant(int dim, double c) {
  FourierProfile p(dim);
  p.add_real_mode(Eigen::VectorXi::Zero(dim), c);
  return p;
}

FourierProfile FourierProfile::sine(int dim, int k, int axis) {
  FourierProfile p(dim);
  Eigen::VectorXi freq = Eigen::VectorXi::Zero(dim);
  freq(axis) = k;
  // sin(x) = (e^{ix} - e^{-ix}) / 2i
  p.add_real_mode(freq, {0.0, -0.5});
  return p;
}

FourierProfile FourierProfile::cosine(int dim, int k, int axis) {
  FourierProfile p(dim);
  Eigen::VectorXi freq = Eigen::VectorXi::Zero(dim);
  freq(axis) = k;
  p.add_real_mode(freq, {0.5, 0.0});
  return p;
}

FourierProfile FourierProfile::parse(const std::string& text, int dim) {
  if (dim < 1) throw Error(Errc::invalid_config, "torus dimension must be >= 1");
  FourierProfile out(dim);
  std::istringstream in(text);
  std::string term;
  while (std::getline(in, term, '+')) {
    double coef = 1.0;
    const auto star = term.find('*');
    try {
      if (star != std::string::npos) {
        coef = std::stod(term.substr(0, star));
        term = term.substr(star + 1);
      }
      FourierProfile part(dim);
      if (term.rfind("const:", 0) == 0) {
        part = constant(dim, std::stod(term.substr(6)));
      } else if (term.rfind("sin", 0) == 0) {
        part = sine(dim, std::stoi(term.substr(3)));
      } else if (term.rfind("cos", 0) == 0) {
        part = cosine(dim, std::stoi(term.substr(3)));
      } else {
        throw Error(Errc::invalid_config, "unknown profile term '" + term + "'");
      }
      for (const auto& mode : part.modes()) out.modes_.push_back({mode.frequency, coef * mode.amplitude});
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::invalid_config, "cannot parse profile term '" + term + "'");
    }
  }
  if (out.modes_.empty()) throw Error(Errc::invalid_config, "empty profile");
  return out;
}

void FourierProfile::add_real_mode(const Eigen::VectorXi& k, std::complex<double> amplitude) {
  if (k.size() != dim_) throw Error(Errc::invalid_config, "mode dimension mismatch");
  if (k.isZero()) {
    modes_.push_back({k, {amplitude.real(), 0.0}});
    return;
  }
  modes_.push_back({k, amplitude});
  modes_.push_back({-k, std::conj(amplitude)});
}

int FourierProfile::max_frequency() const {
  int top = 0;
  for (const auto& mode : modes_) top = std::max(top, mode.frequency.cwiseAbs().maxCoeff());
  return top;
}

std::complex<double> FourierProfile::coefficient(const Eigen::VectorXi& k) const {
  std::complex<double> sum = 0.0;
  for (const auto& mode : modes_) {
    if (mode.frequency == k) sum += mode.amplitude;
  }
  return sum;
}

bool FourierProfile::is_real(double tol) const {
  for (const auto& mode : modes_) {
    if (std::abs(coefficient(-mode.frequency) - std::conj(coefficient(mode.frequency))) > tol) return false;
  }
  return true;
}

double FourierProfile::evaluate(const Eigen::VectorXd& u) const {
  std::complex<double> sum = 0.0;
  for (const auto& mode : modes_) {
    const double phase = 2.0 * std::numbers::pi * mode.frequency.cast<double>().dot(u);
    sum += mode.amplitude * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum.real();
}

double FourierProfile::operator()(double u) const {
  if (dim_ != 1) throw Error(Errc::invalid_config, "scalar evaluation needs a one-dimensional profile");
  return evaluate(Eigen::VectorXd::Constant(1, u));
}

TorusConfig init_from_profile(const FourierProfile& profile, Index n, int d) {
  if (n < 2 || d < 1 || profile.dim() != d) throw Error(Errc::invalid_config, "torus needs n >= 2 and matching d");
  if (!profile.is_real()) throw Error(Errc::invalid_config, "profile is not real-valued");
  TorusConfig config;
  config.dim = d;
  config.side = n;
  Index sites = 1;
  for (int a = 0; a < d; ++a) sites *= n;
  config.opinions.resize(sites);
  Eigen::VectorXd u(d);
  for (Index s = 0; s < sites; ++s) {
    const auto coords = config.coordinates(s);
    for (int a = 0; a < d; ++a) u(a) = static_cast<double>(coords[static_cast<std::size_t>(a)]) / static_cast<double>(n);
    config.opinions(s) = profile.evaluate(u);
  }
  return config;
}

TorusRun run_torus(TorusConfig config, double horizon, const std::vector<double>& snapshot_times, RngStream rng) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error(Errc::invalid_schedule, "horizon must be >= 0");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (!(snapshot_times[i] >= 0.0 && snapshot_times[i] <= horizon) ||
        (i > 0 && !(snapshot_times[i] > snapshot_times[i - 1]))) {
      throw Error(Errc::invalid_schedule, "snapshot times must be increasing inside [0, horizon]");
    }
  }
  const Index sites = config.site_count();
  const auto edges = static_cast<std::uint64_t>(sites) * static_cast<std::uint64_t>(config.dim);
  const double side = static_cast<double>(config.side);
  const double rate = static_cast<double>(edges) * side * side;

  TorusRun result;
  config.time = 0.0;
  std::size_t next = 0;
  double clock = 0.0;
  for (;;) {
    const double event_time = clock + rng.exponential(rate);
    const std::uint64_t edge = rng.below(edges);
    while (next < snapshot_times.size() && snapshot_times[next] < event_time) {
      TorusConfig snap = config;
      snap.time = snapshot_times[next++];
      result.snapshots.push_back(std::move(snap));
    }
    if (event_time > horizon) break;
    const auto site = static_cast<Index>(edge / static_cast<std::uint64_t>(config.dim));
    const auto axis = static_cast<int>(edge % static_cast<std::uint64_t>(config.dim));
    apply_average_inplace(config.opinions, site, config.neighbor(site, axis));
    ++result.event_count;
    clock = event_time;
  }
  config.time = horizon;
  result.config = std::move(config);
  return result;
}

EmpiricalMeasure LatticeMeasure::as_empirical() const {
  if (dim != 1) throw Error(Errc::invalid_measure, "only one-dimensional lattice measures are scalar");
  return {positions.row(0).transpose(), weights, false};
}

LatticeMeasure weighted_empirical(const TorusConfig& config) {
  LatticeMeasure m;
  m.dim = config.dim;
  const Index sites = config.site_count();
  m.positions.resize(config.dim, sites);
  for (Index s = 0; s < sites; ++s) {
    const auto coords = config.coordinates(s);
    for (int a = 0; a < config.dim; ++a) {
      m.positions(a, s) = static_cast<double>(coords[static_cast<std::size_t>(a)]) / static_cast<double>(config.side);
    }
  }
  m.weights = config.opinions / static_cast<double>(sites);
  return m;
}

double pair(const LatticeMeasure& measure, const FourierProfile& g) {
  if (g.dim() != measure.dim) throw Error(Errc::invalid_config, "test function dimension mismatch");
  double sum = 0.0;
  for (Index s = 0; s < measure.weights.size(); ++s) sum += measure.weights(s) * g.evaluate(measure.positions.col(s));
  return sum;
}

double heat_pairing(const FourierProfile& profile, const FourierProfile& g, double t) {
  if (profile.dim() != g.dim()) throw Error(Errc::invalid_config, "profile and test function dimensions differ");
  // <rho_t, G> = sum_k c_k g_{-k} exp(-2 pi^2 |k|^2 t)
  std::complex<double> sum = 0.0;
  for (const auto& mode : profile.modes()) {
    const double k2 = static_cast<double>(mode.frequency.squaredNorm());
    sum += mode.amplitude * g.coefficient(-mode.frequency) * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * k2 * t);
  }
  return sum.real();
}

}  // namespace gossip
