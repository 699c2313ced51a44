#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cli/commands.hpp"

using namespace twophoton;
using namespace twophoton::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("twophoton_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// Runs the CLI binary (path from TWOPHOTON_CLI) and returns its exit code.
int run_cli(const std::string& args) {
  const char* exe = std::getenv("TWOPHOTON_CLI");
  if (!exe) FAIL("TWOPHOTON_CLI is not set");
  const std::string cmd = std::string(exe) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config text parsing") {
  auto kv = parse_config_text("# comment\ngamma = 2 # trailing\n\npulse.length=40\n");
  CHECK(kv.at("gamma") == "2");
  CHECK(kv.at("pulse.length") == "40");
  CHECK_THROWS_AS(parse_config_text("nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("pulse.colour = red\n"), ConfigError);
}

TEST_CASE("overrides and validation") {
  std::map<std::string, std::string> kv{{"pulse.length", "10"}};
  apply_overrides(kv, {"--pulse.length", "40", "--grid.n=300"});
  auto cfg = build_config(kv);
  CHECK(cfg.pulse.length == 40.0);
  CHECK(cfg.grid.n == 300);
  CHECK(cfg.grid.x_max == 40.0);  // grid follows the pulse
  CHECK(cfg.anchor_x == 20.0);
  CHECK_THROWS_AS(apply_overrides(kv, {"--grid.n"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(kv, {"--bogus", "1"}), ConfigError);
  CHECK_THROWS_AS(build_config({{"gamma", "-1"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"pulse.length", "0"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"grid.n", "1"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"pulse.kind", "triangle"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"pulse.kind", "file"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"oracle.mode", "three"}}), ConfigError);
  CHECK_THROWS_AS(build_config({{"tau.min", "1"}, {"tau.max", "0"}}), ConfigError);
}

TEST_CASE("simulation pipeline reproduces the closed form") {
  auto cfg = build_config({{"pulse.length", "20"}, {"grid.n", "151"}});
  auto sim = run_simulation(cfg);
  CHECK(closed_form_deviation(cfg, sim.result.total) <= 1e-10);
  CHECK(assert_symmetry(sim.result.total) == 0.0);
}

TEST_CASE("grid must cover the pulse") {
  auto cfg = build_config({{"pulse.length", "20"}, {"grid.x_max", "15"}});
  CHECK_THROWS_AS(run_simulation(cfg), ConfigError);
}

TEST_CASE("simulate writes deterministic grids and a manifest") {
  const auto dir = scratch("simulate");
  const std::string common = "simulate --pulse.length 6 --grid.n 61 --check --out ";
  REQUIRE(run_cli(common + (dir / "a").string()) == 0);
  REQUIRE(run_cli(common + (dir / "b").string()) == 0);
  for (const char* f : {"psi_out.csv", "psi_lin.csv", "psi_nonlin.csv"}) {
    const auto a = slurp(dir / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / f));
  }
  const auto manifest = slurp(dir / "a" / "manifest.txt");
  CHECK(manifest.find("config.pulse.length = 6") != std::string::npos);
  CHECK(manifest.find("norm.output = ") != std::string::npos);
  CHECK(slurp(dir / "a" / "psi_out.csv").rfind("# twophoton ", 0) == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run_cli("simulate --grid.x_max 3 --out " + (dir / "x").string()) == config_error);
  CHECK(run_cli("simulate --nonsense 1") == config_error);
  CHECK(run_cli("simulate --config " + (dir / "missing.conf").string()) == io_error);
  CHECK(run_cli("frobnicate") == config_error);
  // an impossible tolerance fails the check
  CHECK(run_cli("simulate --pulse.length 4 --grid.n 41 --check --check.tolerance 1e-300 --out " +
                (dir / "y").string()) == tolerance_failure);
  {
    std::ofstream cfg(dir / "run.conf");
    cfg << "pulse.kind = file\npulse.path = " << (dir / "nowhere.csv").string() << "\n";
  }
  CHECK(run_cli("simulate --config " + (dir / "run.conf").string()) == io_error);
}

TEST_CASE("compare reports differences and grid mismatches") {
  const auto dir = scratch("compare");
  REQUIRE(run_cli("simulate --pulse.length 4 --grid.n 41 --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("simulate --pulse.length 4 --grid.n 51 --out " + (dir / "b").string()) == 0);
  const auto a = (dir / "a" / "psi_out.csv").string();
  CHECK(run_cli("compare " + a + " " + a + " --check") == 0);
  CHECK(run_cli("compare " + a + " " + (dir / "b" / "psi_out.csv").string()) == config_error);
  CHECK(run_cli("compare " + a + " " + (dir / "a" / "psi_lin.csv").string() + " --check") == tolerance_failure);
}

TEST_CASE("file pulses are renormalized and can be propagated") {
  const auto dir = scratch("file");
  auto g = Grid1D::with_spacing(0.0, 4.0, 0.05, std::vector<double>{});
  auto w = Wavefunction1::from_function(g, [](double x, Limit) { return cplx(2.0 * std::exp(-(x - 2) * (x - 2))); });
  {
    std::ofstream f(dir / "pulse.csv");
    write_csv(f, w);
  }
  auto cfg = build_config({{"pulse.kind", "file"}, {"pulse.path", (dir / "pulse.csv").string()}, {"grid.n", "200"}});
  auto sim = run_simulation(cfg);
  CHECK(std::abs(norm1(*sim.input.factor) - 1.0) < 1e-12);
  REQUIRE(!sim.input.warnings.empty());
  CHECK(sim.input.warnings[0].find("renormalized") != std::string::npos);
  CHECK(sim.grid.x_min() == Catch::Approx(-10.0));
}

TEST_CASE("g2 and decompose commands") {
  const auto dir = scratch("g2");
  const std::string base = "--pulse.length 40 --grid.x_min 0 --grid.n 801 --tau.n 2001 ";
  CHECK(run_cli("g2 " + base + "--check --out " + (dir / "full").string()) == 0);
  CHECK(run_cli("g2 " + base + "--linear-only --check --out " + (dir / "lin").string()) == 0);
  const auto m = slurp(dir / "full" / "manifest.txt");
  CHECK(m.find("zeros.count = 2") != std::string::npos);
  CHECK(slurp(dir / "lin" / "manifest.txt").find("zeros = none") != std::string::npos);
  CHECK(slurp(dir / "full" / "g2.csv").find("tau,value") != std::string::npos);
  CHECK(run_cli("decompose --pulse.length 10 --grid.n 101 --check --out " + (dir / "dec").string()) == 0);
  CHECK(fs::exists(dir / "dec" / "process_iii.csv"));
}

TEST_CASE("oracle command") {
  const auto dir = scratch("oracle");
  CHECK(run_cli("oracle --pulse.length 5 --oracle.mode one --oracle.dx 0.005 --check --out " + (dir / "one").string()) == 0);
  const auto m = slurp(dir / "one" / "manifest.txt");
  CHECK(m.find("oracle.convergence_ratio = 1.9") != std::string::npos);
  CHECK(fs::exists(dir / "one" / "oracle_trace.csv"));
  CHECK(run_cli("oracle --pulse.length 2 --oracle.dx 0.04 --check --out " + (dir / "two").string()) == 0);
  CHECK(run_cli("oracle --pulse.kind gaussian --pulse.center 3 --pulse.width 0.5 --oracle.mode one --oracle.dx 0.01 --check --out " +
                (dir / "gauss").string()) == 0);
}
