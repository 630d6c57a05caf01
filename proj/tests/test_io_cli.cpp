#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gossip/commands.hpp"
#include "gossip/error.hpp"
#include "gossip/io.hpp"

using namespace gossip;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gossip-cli-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

int cli(const std::string& args) {
  const std::string command = std::string(GOSSIP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("numbers format in shortest round-trip form") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("csv writer and reader round-trip") {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "t.csv");
    CsvWriter csv(f);
    csv.header({"a", "b", "c"});
    csv.row(1, 0.25, "x");
    csv.row(std::int64_t{-3}, 1e-17, std::string("y"));
  }
  CHECK(slurp(dir / "t.csv") == "a,b,c\n1,0.25,x\n-3,1e-17,y\n");
  const auto table = read_csv(dir / "t.csv");
  CHECK(table.rows.size() == 2);
  CHECK(table.column("b") == 1);
  CHECK(table.number(1, 1) == 1e-17);
  CHECK_THROWS_AS(table.column("zzz"), Error);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), Error);
}

TEST_CASE("schedules and lists") {
  CHECK(parse_real_list("0,0.5, 1") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(parse_real_list("1,x"), Error);
  const auto s = even_schedule(2.0, 5);
  CHECK(s == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK(even_schedule(0.0, 5) == std::vector<double>{0.0});
}

TEST_CASE("error classification") {
  CHECK(is_numerical(Errc::instability));
  CHECK(is_numerical(Errc::undefined_moment));
  CHECK_FALSE(is_numerical(Errc::invalid_config));
  CHECK(std::string(to_string(Errc::alignment)).size() > 0);
}

TEST_CASE("simulate: point mass on two vertices, determinism, manifest") {
  const auto a = scratch("point-a"), b = scratch("point-b");
  REQUIRE(cli("simulate --n 2 --t 10 --dist point:1.0 --seed 7 --out " + a.string()) == 0);
  REQUIRE(cli("simulate --n 2 --t 10 --dist point:1.0 --seed 7 --out " + b.string()) == 0);
  const auto table = read_csv(a / "snapshots.csv");
  const auto col = table.column("opinion");
  CHECK(table.rows.size() == 4);
  for (std::size_t r = 0; r < table.rows.size(); ++r) CHECK(table.number(r, col) == 1.0);
  for (const char* f : {"snapshots.csv", "xj.csv", "summary.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  const std::string manifest = slurp(a / "manifest.json");
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("wall_time_seconds") != std::string::npos);
}

TEST_CASE("simulate: xj table has one row per replica and count") {
  const auto dir = scratch("xj");
  REQUIRE(cli("simulate --n 10000 --t 1 --dist ber:0.5 --replicas 100 --seed 1 --out " + dir.string()) == 0);
  const auto table = read_csv(dir / "xj.csv");
  double top = 0.0;
  const auto j = table.column("j");
  for (std::size_t r = 0; r < table.rows.size(); ++r) top = std::max(top, table.number(r, j));
  CHECK(table.rows.size() == 100 * std::size_t(top + 1));
  CHECK(table.header == std::vector<std::string>{"replica_id", "t", "j", "count", "expected"});
}

TEST_CASE("solve-pde: mass drift on the linear density") {
  const auto dir = scratch("pde");
  REQUIRE(cli("solve-pde --dist linear2x --L 2 --n 4096 --dt 1e-3 --t 2 --out " + dir.string()) == 0);
  const auto m = read_csv(dir / "moments.csv");
  const auto c = m.column("mass");
  for (std::size_t r = 0; r < m.rows.size(); ++r) CHECK(std::abs(m.number(r, c) - m.number(0, c)) <= 1e-6);
  CHECK(fs::exists(dir / "density.csv"));
  CHECK(slurp(dir / "grid.json").find("tail_mass") != std::string::npos);

  const auto self = scratch("pde-self");
  REQUIRE(cli("compare --a " + dir.string() + " --b " + dir.string() + " --out " + self.string()) == 0);
  const auto report = read_csv(self / "comparison.csv");
  const auto metric = report.column("metric_name"), value = report.column("value");
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    if (report.rows[r][metric] == "w1") CHECK(report.number(r, value) <= 1e-6);
  }
}

TEST_CASE("solve-atoms: mass at zero") {
  const auto dir = scratch("atoms");
  REQUIRE(cli("solve-atoms --dist ber:0.5 --J 12 --t 1 --out " + dir.string()) == 0);
  const auto table = read_csv(dir / "atoms.csv");
  const auto t = table.column("t"), k = table.column("k"), mass = table.column("mass");
  bool found = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.number(r, t) == 1.0 && table.number(r, k) == 0.0) {
      CHECK(table.number(r, mass) == doctest::Approx(0.11920).epsilon(1e-4));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("simulate-torus: reference column is the decayed mode") {
  const auto dir = scratch("torus");
  REQUIRE(cli("simulate-torus --d 1 --n 256 --profile sin1 --t 0.05 --replicas 50 --out " + dir.string()) == 0);
  const auto table = read_csv(dir / "pairing.csv");
  const auto t = table.column("t"), name = table.column("G_name"), ref = table.column("reference");
  bool found = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.number(r, t) == 0.05 && table.rows[r][name] == "sin1") {
      CHECK(table.number(r, ref) == doctest::Approx(0.5 * std::exp(-2.0 * M_PI * M_PI * 0.05)));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("compare: simulation against the atomic solver, and misaligned times") {
  const auto sim = scratch("cmp-sim"), atoms = scratch("cmp-atoms"), out = scratch("cmp-out");
  REQUIRE(cli("simulate --n 20000 --t 1 --dist ber:0.5 --snapshots 0,1 --seed 3 --out " + sim.string()) == 0);
  REQUIRE(cli("solve-atoms --dist ber:0.5 --J 8 --t 1 --snapshots 0,1 --out " + atoms.string()) == 0);
  const int status = cli("compare --a " + sim.string() + " --b " + atoms.string() + " --w1-tol 0.02 --out " + out.string());
  const auto report = read_csv(out / "comparison.csv");
  const auto metric = report.column("metric_name");
  std::size_t atom_rows = 0;
  for (const auto& row : report.rows) atom_rows += row[metric].rfind("atom_mass", 0) == 0 ? 1 : 0;
  CHECK(atom_rows == 4);
  CHECK((status == 0 || status == 3));

  const auto late = scratch("cmp-late"), bad = scratch("cmp-bad");
  REQUIRE(cli("solve-atoms --dist ber:0.5 --J 6 --t 1 --snapshots 0.5,1 --out " + late.string()) == 0);
  CHECK(cli("compare --a " + sim.string() + " --b " + late.string() + " --out " + bad.string()) == 1);
}

TEST_CASE("invalid input exits with status 1") {
  const auto dir = scratch("invalid");
  CHECK(cli("simulate --n 10 --dist gamma:1 --out " + dir.string()) == 1);
  CHECK(cli("simulate --n 0 --out " + dir.string()) != 0);
  CHECK(cli("simulate --n 10 --dist cauchy:1 --out " + dir.string()) == 1);
  CHECK(cli("solve-pde --n 7 --out " + dir.string()) == 1);
  CHECK(cli("solve-pde --dt 1 --n 64 --out " + dir.string()) == 1);
  CHECK(cli("solve-atoms --dist linear2x --out " + dir.string()) == 1);
  CHECK(cli("simulate --t 1 --snapshots 0.5,0.2 --out " + dir.string()) == 1);
  CHECK(cli("frobnicate") != 0);
}

TEST_CASE("config file supplies defaults that flags override") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.toml");
    f << "[simulate]\nn = 5\nt = 0.5\ndist = \"point:2\"\nseed = 11\n";
  }
  REQUIRE(cli("--config " + (dir / "run.toml").string() + " simulate --n 3 --out " + (dir / "out").string()) == 0);
  const auto table = read_csv(dir / "out" / "snapshots.csv");
  CHECK(table.rows.size() == 6);  // 3 vertices, 2 snapshots
  CHECK(table.number(0, table.column("opinion")) == 2.0);
  CHECK(slurp(dir / "out" / "manifest.json").find("\"seed\": 11") != std::string::npos);
}

TEST_CASE("output root from the environment") {
  const auto root = scratch("env-root");
  OutputOptions out;
  out.experiment_id = "sweep";
  setenv("GOSSIP_OUTPUT_ROOT", root.string().c_str(), 1);
  const auto first = resolve_output_dir(out, "simulate");
  const auto second = resolve_output_dir(out, "simulate");
  unsetenv("GOSSIP_OUTPUT_ROOT");
  CHECK(first.parent_path() == root);
  CHECK(first.filename().string().rfind("sweep-", 0) == 0);
  CHECK(first != second);
  CHECK(fs::is_directory(second));
}

TEST_CASE("verify runs a selected criterion") {
  const auto dir = scratch("verify");
  CHECK(cli("verify --quick --only 1,3 --out " + dir.string()) == 0);
  const auto table = read_csv(dir / "acceptance.csv");
  CHECK(table.rows.size() == 2);
}
