#include "gossip/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gossip/acceptance.hpp"
#include "gossip/analysis.hpp"
#include "gossip/io.hpp"
#include "gossip/limit_atoms.hpp"
#include "gossip/limit_pde.hpp"
#include "gossip/parallel.hpp"
#include "gossip/sim_complete.hpp"
#include "gossip/sim_torus.hpp"

namespace gossip {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path resolve_output_dir(const OutputOptions& out, const std::string& command) {
  fs::path dir;
  if (!out.directory.empty()) {
    dir = out.directory;
  } else {
    const char* root = std::getenv("GOSSIP_OUTPUT_ROOT");
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream stamp;
    stamp << std::put_time(&utc, "%Y%m%dT%H%M%SZ");
    const std::string id = out.experiment_id.empty() ? command : out.experiment_id;
    dir = fs::path(root && *root ? root : "runs") / (id + "-" + stamp.str());
    for (int suffix = 1; fs::exists(dir); ++suffix) {
      dir = fs::path(root && *root ? root : "runs") / (id + "-" + stamp.str() + "-" + std::to_string(suffix));
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::io, "cannot write " + path.string());
  return file;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& experiment_id,
                    json parameters, double wall_seconds) {
  json manifest;
  manifest["command"] = command;
  manifest["experiment_id"] = experiment_id.empty() ? command : experiment_id;
  manifest["version"] = kVersion;
  manifest["parameters"] = std::move(parameters);
  manifest["wall_time_seconds"] = wall_seconds;
  auto file = open_out(dir / "manifest.json");
  file << manifest.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_config, what);
}

std::vector<double> schedule_or(const std::vector<double>& requested, std::vector<double> fallback) {
  return requested.empty() ? fallback : requested;
}

std::vector<double> endpoints(double horizon) {
  return horizon > 0.0 ? std::vector<double>{0.0, horizon} : std::vector<double>{0.0};
}

}  // namespace

int cmd_simulate(const SimulateConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  require(config.n >= 1, "--n must be >= 1");
  require(config.horizon >= 0.0 && std::isfinite(config.horizon), "--t must be finite and >= 0");
  require(config.replicas >= 1, "--replicas must be >= 1");
  const auto dist = InitialDistribution::parse(config.dist);
  require(dist.kind() != InitialDistribution::Kind::cauchy, "the simulator needs compactly supported initial data");
  const auto times = schedule_or(config.snapshots, endpoints(config.horizon));

  const auto replicas = static_cast<std::size_t>(config.replicas);
  std::vector<CompleteGraphRun> runs(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    runs[r] = run(dist, config.n, config.horizon, times, RngStream(config.seed, r));
  }, config.threads);

  const fs::path dir = resolve_output_dir(config.out, "simulate");
  {
    auto file = open_out(dir / "snapshots.csv");
    CsvWriter csv(file);
    csv.header({"replica_id", "t", "vertex", "opinion", "xi"});
    for (std::size_t r = 0; r < replicas; ++r) {
      for (const auto& snap : runs[r].snapshots) {
        for (Index x = 0; x < snap.config.n_vertices(); ++x) csv.row(r, snap.time, x, snap.config.opinions(x), snap.xi(x));
      }
    }
  }
  {
    std::int64_t top = 0;
    for (const auto& r : runs) top = std::max<std::int64_t>(top, r.xi.maxCoeff());
    auto file = open_out(dir / "xj.csv");
    CsvWriter csv(file);
    csv.header({"replica_id", "t", "j", "count", "expected"});
    for (std::size_t r = 0; r < replicas; ++r) {
      std::vector<std::int64_t> counts(static_cast<std::size_t>(top + 1), 0);
      for (Index x = 0; x < runs[r].xi.size(); ++x) ++counts[static_cast<std::size_t>(runs[r].xi(x))];
      for (std::int64_t j = 0; j <= top; ++j) {
        csv.row(r, config.horizon, j, counts[static_cast<std::size_t>(j)],
                expected_xj(config.n, config.horizon, static_cast<int>(j)));
      }
    }
  }
  {
    auto file = open_out(dir / "summary.csv");
    CsvWriter csv(file);
    csv.header({"replica_id", "t", "mean", "variance", "min", "max"});
    for (std::size_t r = 0; r < replicas; ++r) {
      for (const auto& snap : runs[r].snapshots) {
        csv.row(r, snap.time, sample_mean(snap.config), sample_variance(snap.config), snap.config.opinions.minCoeff(),
                snap.config.opinions.maxCoeff());
      }
    }
  }
  json params{{"n", config.n}, {"t", config.horizon}, {"dist", dist.to_string()}, {"seed", config.seed},
              {"replicas", config.replicas}, {"snapshots", times}};
  write_manifest(dir, "simulate", config.out.experiment_id, params, seconds_since(start));
  if (!config.out.quiet) log << "simulate: wrote " << dir.string() << '\n';
  return exit_code::ok;
}

int cmd_simulate_torus(const TorusConfigArgs& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  require(config.d >= 1 && config.d <= 3, "--d must lie in [1, 3]");
  require(config.n >= 2, "--n must be >= 2");
  require(config.horizon >= 0.0 && std::isfinite(config.horizon), "--t must be finite and >= 0");
  require(config.replicas >= 1, "--replicas must be >= 1");
  const auto profile = FourierProfile::parse(config.profile, config.d);
  std::vector<FourierProfile> tests;
  for (const auto& name : config.test_functions) tests.push_back(FourierProfile::parse(name, config.d));
  const auto times = schedule_or(config.snapshots, endpoints(config.horizon));
  const TorusConfig initial = init_from_profile(profile, config.n, config.d);

  const auto replicas = static_cast<std::size_t>(config.replicas);
  std::vector<TorusRun> runs(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    runs[r] = run_torus(initial, config.horizon, times, RngStream(config.seed, r));
  }, config.threads);

  const fs::path dir = resolve_output_dir(config.out, "simulate-torus");
  {
    auto file = open_out(dir / "snapshots.csv");
    CsvWriter csv(file);
    std::vector<std::string> header{"replica_id", "t"};
    for (int a = 0; a < config.d; ++a) header.push_back("i" + std::to_string(a));
    header.emplace_back("opinion");
    csv.header(header);
    for (std::size_t r = 0; r < replicas; ++r) {
      for (const auto& snap : runs[r].snapshots) {
        for (Index s = 0; s < snap.site_count(); ++s) {
          file << r << ',' << format_double(snap.time);
          for (Index c : snap.coordinates(s)) file << ',' << c;
          file << ',' << format_double(snap.opinions(s)) << '\n';
        }
      }
    }
  }
  {
    auto file = open_out(dir / "pairing.csv");
    CsvWriter csv(file);
    csv.header({"t", "G_name", "simulated", "reference", "stderr"});
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t g = 0; g < tests.size(); ++g) {
        Eigen::VectorXd values(static_cast<Index>(replicas));
        for (std::size_t r = 0; r < replicas; ++r) {
          values(static_cast<Index>(r)) = pair(weighted_empirical(runs[r].snapshots[k]), tests[g]);
        }
        const double mean = values.mean();
        const double se = replicas > 1 ? std::sqrt((values.array() - mean).square().sum() /
                                                   static_cast<double>(replicas - 1) / static_cast<double>(replicas))
                                       : 0.0;
        csv.row(times[k], config.test_functions[g], mean, heat_pairing(profile, tests[g], times[k]), se);
      }
    }
  }
  json params{{"d", config.d}, {"n", config.n}, {"t", config.horizon}, {"profile", config.profile},
              {"test_functions", config.test_functions}, {"seed", config.seed}, {"replicas", config.replicas},
              {"snapshots", times}};
  write_manifest(dir, "simulate-torus", config.out.experiment_id, params, seconds_since(start));
  if (!config.out.quiet) log << "simulate-torus: wrote " << dir.string() << '\n';
  return exit_code::ok;
}

int cmd_solve_pde(const PdeConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  require(config.half_width > 0.0, "--L must be positive");
  require(config.n_cells >= 2 && config.n_cells % 2 == 0, "--n must be even and >= 2");
  require(config.dt > 0.0, "--dt must be positive");
  require(config.horizon >= 0.0 && std::isfinite(config.horizon), "--t must be finite and >= 0");
  require(config.backend == "fft" || config.backend == "direct", "--backend is fft or direct");
  const auto dist = InitialDistribution::parse(config.dist);
  require(dist.has_density(), "solve-pde needs a distribution with a density");
  const auto times = schedule_or(config.snapshots, even_schedule(config.horizon, 11));

  const auto grid0 = DensityGrid<double>::from_distribution(dist, config.half_width, config.n_cells);
  const double tail_mass = 1.0 - mass(grid0);
  PdeOptions<double> options;
  options.backend = config.backend == "fft" ? ConvolutionBackend::fft : ConvolutionBackend::direct;
  const auto snaps = integrate(grid0, config.dt, config.horizon, times, options);

  const fs::path dir = resolve_output_dir(config.out, "solve-pde");
  {
    auto file = open_out(dir / "density.csv");
    CsvWriter csv(file);
    csv.header({"t", "u", "rho"});
    for (const auto& g : snaps) {
      for (Index i = 0; i < g.size(); ++i) csv.row(g.time, g.node(i), g.values(i));
    }
  }
  {
    auto file = open_out(dir / "moments.csv");
    CsvWriter csv(file);
    csv.header({"t", "mass", "mean", "variance"});
    for (const auto& g : snaps) {
      const auto m = moments(g);
      csv.row(g.time, m.mass, m.mean, m.variance);
    }
  }
  json grid{{"half_width", config.half_width}, {"n_cells", config.n_cells}, {"spacing", grid0.spacing()},
            {"dt", config.dt},           {"horizon", config.horizon},   {"dist", dist.to_string()},
            {"backend", config.backend}, {"tail_mass", tail_mass},      {"snapshots", times}};
  {
    auto file = open_out(dir / "grid.json");
    file << grid.dump(2) << '\n';
  }
  write_manifest(dir, "solve-pde", config.out.experiment_id, grid, seconds_since(start));
  if (!config.out.quiet) log << "solve-pde: wrote " << dir.string() << " (tail mass " << tail_mass << ")\n";
  return exit_code::ok;
}

int cmd_solve_atoms(const AtomsConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  require(config.level >= 1 && config.level <= 20, "--J must lie in [1, 20]");
  require(config.dt > 0.0 && config.dt <= 1e-3, "--dt must lie in (0, 1e-3]");
  require(config.horizon >= 0.0 && std::isfinite(config.horizon), "--t must be finite and >= 0");
  const auto dist = InitialDistribution::parse(config.dist);
  require(dist.is_atomic(), "solve-atoms needs an atomic distribution (point or ber)");
  const auto times = schedule_or(config.snapshots, even_schedule(config.horizon, 11));

  const auto mu0 = AtomicMeasure<double>::from_atoms(dist.atoms(), config.level);
  const auto snaps = integrate_atoms(mu0, config.dt, config.horizon, times);

  const fs::path dir = resolve_output_dir(config.out, "solve-atoms");
  {
    auto file = open_out(dir / "atoms.csv");
    CsvWriter csv(file);
    csv.header({"t", "k", "J", "value", "mass", "snapped_mass_total"});
    for (const auto& mu : snaps) {
      for (Index k = 0; k < mu.masses.size(); ++k) {
        csv.row(mu.time, k, mu.level, mu.value(k), mu.masses(k), mu.snapped_mass_total);
      }
    }
  }
  json params{{"dist", dist.to_string()}, {"J", config.level}, {"dt", config.dt}, {"t", config.horizon},
              {"offset", mu0.offset},     {"scale", mu0.scale},  {"snapshots", times}};
  write_manifest(dir, "solve-atoms", config.out.experiment_id, params, seconds_since(start));
  if (!config.out.quiet) log << "solve-atoms: wrote " << dir.string() << '\n';
  return exit_code::ok;
}

namespace {

/// One run directory loaded for comparison: per snapshot time, one or more probability measures.
struct Loaded {
  enum class Kind { simulation, density, atoms } kind;
  std::vector<double> times;
  std::vector<std::vector<Cdf>> cdfs;                    // [time][sample]
  std::vector<std::vector<std::pair<double, double>>> moments;  // [time][sample] (mean, variance)
  std::vector<std::vector<EmpiricalMeasure>> empirical;  // simulation and atoms only
  int level = 0;
};

std::size_t time_slot(std::vector<double>& times, double t) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == t) return i;
  }
  times.push_back(t);
  return times.size() - 1;
}

std::pair<double, double> empirical_moments(const EmpiricalMeasure& mu) {
  const double total = mu.weights.sum();
  const double mean = mu.weights.dot(mu.values) / total;
  const double second = mu.weights.dot(mu.values.cwiseProduct(mu.values)) / total;
  return {mean, second - mean * mean};
}

Loaded load_run(const fs::path& dir) {
  Loaded out;
  if (fs::exists(dir / "snapshots.csv") && fs::exists(dir / "xj.csv")) {
    out.kind = Loaded::Kind::simulation;
    const auto table = read_csv(dir / "snapshots.csv");
    const auto c_rep = table.column("replica_id"), c_t = table.column("t"), c_op = table.column("opinion");
    std::vector<std::map<long, std::vector<double>>> grouped;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      const std::size_t slot = time_slot(out.times, table.number(row, c_t));
      if (grouped.size() <= slot) grouped.resize(slot + 1);
      grouped[slot][std::stol(table.rows[row][c_rep])].push_back(table.number(row, c_op));
    }
    for (const auto& by_replica : grouped) {
      out.cdfs.emplace_back();
      out.moments.emplace_back();
      out.empirical.emplace_back();
      for (const auto& [replica, values] : by_replica) {
        auto mu = EmpiricalMeasure::from_opinions(Eigen::Map<const Eigen::VectorXd>(values.data(), Index(values.size())));
        out.cdfs.back().push_back(Cdf::of(mu));
        out.moments.back().push_back(empirical_moments(mu));
        out.empirical.back().push_back(std::move(mu));
      }
    }
    return out;
  }
  if (fs::exists(dir / "density.csv")) {
    out.kind = Loaded::Kind::density;
    const auto table = read_csv(dir / "density.csv");
    const auto c_t = table.column("t"), c_u = table.column("u"), c_rho = table.column("rho");
    std::vector<std::vector<std::pair<double, double>>> grouped;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      const std::size_t slot = time_slot(out.times, table.number(row, c_t));
      if (grouped.size() <= slot) grouped.resize(slot + 1);
      grouped[slot].emplace_back(table.number(row, c_u), table.number(row, c_rho));
    }
    for (const auto& nodes : grouped) {
      if (nodes.size() < 3) throw Error(Errc::io, "density snapshot with fewer than three nodes");
      const auto n = static_cast<Index>(nodes.size());
      DensityGrid<double> grid = DensityGrid<double>::zeros(-nodes.front().first, n - 1);
      for (Index i = 0; i < n; ++i) grid.values(i) = nodes[static_cast<std::size_t>(i)].second;
      const auto m = gossip::moments(grid);
      out.cdfs.push_back({Cdf::from_density(nodes.front().first, grid.spacing(), grid.values)});
      out.moments.push_back({{m.mean, m.variance}});
    }
    return out;
  }
  if (fs::exists(dir / "atoms.csv")) {
    out.kind = Loaded::Kind::atoms;
    const auto table = read_csv(dir / "atoms.csv");
    const auto c_t = table.column("t"), c_v = table.column("value"), c_m = table.column("mass"), c_j = table.column("J");
    std::vector<std::vector<std::pair<double, double>>> grouped;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      const std::size_t slot = time_slot(out.times, table.number(row, c_t));
      if (grouped.size() <= slot) grouped.resize(slot + 1);
      grouped[slot].emplace_back(table.number(row, c_v), table.number(row, c_m));
      out.level = static_cast<int>(table.number(row, c_j));
    }
    for (auto& atoms : grouped) {
      double total = 0.0;
      for (const auto& a : atoms) total += a.second;
      for (auto& a : atoms) a.second = std::max(a.second, 0.0) / total;
      auto mu = EmpiricalMeasure::from_atoms(atoms);
      mu.normalized = true;
      out.cdfs.push_back({Cdf::of(mu)});
      out.moments.push_back({empirical_moments(mu)});
      out.empirical.push_back({std::move(mu)});
    }
    return out;
  }
  throw Error(Errc::io, dir.string() + " holds no snapshots.csv, density.csv or atoms.csv");
}

/// Mass the measure puts exactly on `value`.
double mass_at(const EmpiricalMeasure& mu, double value) {
  double m = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu.values(i) == value) m += mu.weights(i);
  }
  return m;
}

}  // namespace

int cmd_compare(const CompareConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  require(!config.a.empty() && !config.b.empty(), "compare needs --a and --b run directories");
  const Loaded a = load_run(config.a);
  const Loaded b = load_run(config.b);
  const std::string id = config.out.experiment_id.empty() ? "compare" : config.out.experiment_id;

  std::vector<ComparisonRow> rows;
  for (std::size_t ia = 0; ia < a.times.size(); ++ia) {
    const double t = a.times[ia];
    std::size_t ib = b.times.size();
    for (std::size_t k = 0; k < b.times.size(); ++k) {
      if (std::abs(b.times[k] - t) <= 1e-9 * (1.0 + std::abs(t))) ib = k;
    }
    if (ib == b.times.size()) {
      throw Error(Errc::alignment, "time " + format_double(t) + " of " + config.a + " missing from " + config.b);
    }
    const bool many = a.cdfs[ia].size() > 1 || b.cdfs[ib].size() > 1;
    for (std::size_t sa = 0; sa < a.cdfs[ia].size(); ++sa) {
      for (std::size_t sb = 0; sb < b.cdfs[ib].size(); ++sb) {
        const std::string tag = many ? "[" + std::to_string(sa) + "," + std::to_string(sb) + "]" : "";
        const double w1 = wasserstein1(a.cdfs[ia][sa], b.cdfs[ib][sb]);
        rows.push_back({id, t, "w1" + tag, w1, config.w1_tolerance, w1 <= config.w1_tolerance});
        const auto [ma, va] = a.moments[ia][sa];
        const auto [mb, vb] = b.moments[ib][sb];
        rows.push_back({id, t, "mean_abs_diff" + tag, std::abs(ma - mb), config.moment_tolerance,
                        std::abs(ma - mb) <= config.moment_tolerance});
        rows.push_back({id, t, "variance_abs_diff" + tag, std::abs(va - vb), config.moment_tolerance,
                        std::abs(va - vb) <= config.moment_tolerance});
      }
    }
    // Simulation against the atomic solver: extreme atoms, binomial 3-sigma band.
    const Loaded* sim = a.kind == Loaded::Kind::simulation ? &a : (b.kind == Loaded::Kind::simulation ? &b : nullptr);
    const Loaded* atoms = a.kind == Loaded::Kind::atoms ? &a : (b.kind == Loaded::Kind::atoms ? &b : nullptr);
    if (sim && atoms) {
      const std::size_t is = sim == &a ? ia : ib;
      const std::size_t iat = atoms == &a ? ia : ib;
      const auto& solver = atoms->empirical[iat].front();
      for (Index k : {Index{0}, solver.size() - 1}) {
        const double value = solver.values(k);
        const double p = solver.weights(k);
        for (std::size_t r = 0; r < sim->empirical[is].size(); ++r) {
          const auto& mu = sim->empirical[is][r];
          const double n = static_cast<double>(mu.size());
          const double tol = 3.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) / n) + 1e-12;
          const double diff = std::abs(mass_at(mu, value) - p);
          rows.push_back({id, t, "atom_mass[value=" + format_double(value) + "][" + std::to_string(r) + "]", diff, tol,
                          diff <= tol});
        }
      }
    }
  }

  const fs::path dir = resolve_output_dir(config.out, "compare");
  {
    auto file = open_out(dir / "comparison.csv");
    CsvWriter csv(file);
    csv.header({"experiment_id", "t", "metric_name", "value", "tolerance", "pass_flag"});
    for (const auto& row : rows) csv.row(row.experiment_id, row.t, row.metric_name, row.value, row.tolerance, int(row.pass));
  }
  std::size_t failures = 0;
  for (const auto& row : rows) failures += row.pass ? 0 : 1;
  json params{{"a", config.a}, {"b", config.b}, {"w1_tolerance", config.w1_tolerance},
              {"moment_tolerance", config.moment_tolerance}, {"rows", rows.size()}, {"failures", failures}};
  write_manifest(dir, "compare", config.out.experiment_id, params, seconds_since(start));
  if (!config.out.quiet) {
    log << "compare: " << rows.size() - failures << "/" << rows.size() << " metrics within tolerance; wrote "
        << dir.string() << '\n';
  }
  return failures == 0 ? exit_code::ok : exit_code::acceptance;
}

int cmd_verify(const VerifyConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = resolve_output_dir(config.out, "verify");
  AcceptanceOptions options;
  options.full = config.full;
  options.only = config.only;
  options.scratch_dir = dir / "scratch";
  const auto results = run_acceptance(options, log);

  std::size_t failures = 0;
  {
    auto file = open_out(dir / "acceptance.csv");
    CsvWriter csv(file);
    csv.header({"criterion", "name", "pass_flag", "seconds", "detail"});
    for (const auto& r : results) {
      std::string detail = r.detail;
      for (char& c : detail) {
        if (c == ',' || c == '\n') c = ';';
      }
      csv.row(r.id, r.name, int(r.passed), r.seconds, detail);
      failures += r.passed ? 0 : 1;
    }
  }
  json params{{"full", config.full}, {"only", config.only}, {"failures", failures}};
  write_manifest(dir, "verify", config.out.experiment_id, params, seconds_since(start));
  return failures == 0 ? exit_code::ok : exit_code::acceptance;
}

}  // namespace gossip
