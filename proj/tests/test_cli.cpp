#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zoll/config.hpp"

using namespace zoll;
namespace fs = std::filesystem;

#ifndef ZOLL_CLI_PATH
#define ZOLL_CLI_PATH "zoll"
#endif

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ZOLL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / "zoll_cli_test";
  fs::create_directories(d);
  return d;
}
}  // namespace

TEST_CASE("config parsing") {
  SECTION("flat key-value text with comments") {
    ExperimentConfig c = ExperimentConfig::parse(
        "# comment\n"
        "surface.kind = tannery\n"
        "surface.sigma = 0.3 -0.3\n"
        "seed = 11\n");
    CHECK(c.require_string("surface.kind") == "tannery");
    CHECK(c.seed() == 11);
    CHECK(c.surface().kind() == SurfaceKind::Tannery);
  }
  SECTION("json alternative flattens to the same fields") {
    ExperimentConfig a = ExperimentConfig::parse(
        "{\"surface\": {\"kind\": \"tannery\", \"sigma\": [0.3, -0.3]}, \"seed\": 11}");
    CHECK(a.require_string("surface.kind") == "tannery");
    CHECK(a.seed() == 11);
    std::vector<double> sig = a.get_doubles("surface.sigma");
    REQUIRE(sig.size() == 2);
    CHECK(sig[0] == Catch::Approx(0.3));
    CHECK(sig[1] == Catch::Approx(-0.3));
    CHECK(a.surface().kind() == SurfaceKind::Tannery);
    // identical text yields an identical digest
    ExperimentConfig b = ExperimentConfig::parse(
        "{\"surface\": {\"kind\": \"tannery\", \"sigma\": [0.3, -0.3]}, \"seed\": 11}");
    CHECK(a.digest() == b.digest());
  }
  SECTION("field-precise errors") {
    CHECK_THROWS_AS(ExperimentConfig::parse("surface.kind = dodecahedron\n").surface(),
                    config_error);
    CHECK_THROWS_AS(ExperimentConfig::parse("surface.kind = tannery\n").surface(), config_error);
    CHECK_THROWS_AS(ExperimentConfig::parse("a = 1\nbroken line\n"), config_error);
    ExperimentConfig c = ExperimentConfig::parse("x = abc\n");
    CHECK_THROWS_AS(c.get_double("x", 0.0), config_error);
  }
  SECTION("digest changes with any entry") {
    ExperimentConfig a = ExperimentConfig::parse("k = 1\n");
    ExperimentConfig b = ExperimentConfig::parse("k = 2\n");
    CHECK(a.digest() != b.digest());
  }
  SECTION("potential records") {
    ExperimentConfig c = ExperimentConfig::parse(
        "potential.kind = ambient\npotential.terms = 0 0 2 1.0 ; 1 0 0 0.5\n");
    Potential v = c.potential();
    CHECK(v(0.3, 0.9) == Catch::Approx(std::cos(0.3) * std::cos(0.3) +
                                       0.5 * std::sin(0.3) * std::cos(0.9)));
    ExperimentConfig h = ExperimentConfig::parse(
        "potential.kind = harmonic\npotential.lmax = 2\npotential.coeffs = 2 1 0.4 -0.2\n");
    CHECK_NOTHROW(h.potential());
  }
}

TEST_CASE("cli runs and is reproducible") {
  fs::path dir = temp_dir();
  write_file(dir / "q0.cfg",
             "surface.kind = tannery\nsurface.sigma = 0.3 -0.3\nq0.samples = 512\n"
             "q0.sweep_count = 3\nseed = 5\n");
  SECTION("q0 subcommand emits the report") {
    REQUIRE(run_cli("q0 --config " + (dir / "q0.cfg").string() + " --out " + (dir / "a").string()) == 0);
    std::string a = slurp(dir / "a" / "q0.csv");
    CHECK(a.find("# config ") == 0);
    CHECK(a.find("label,pphi,q0") != std::string::npos);
    CHECK(a.find("equator") != std::string::npos);
    CHECK(a.find("meridian") != std::string::npos);
    // byte-identical on a second run with the same config + seed
    REQUIRE(run_cli("q0 --config " + (dir / "q0.cfg").string() + " --out " + (dir / "b").string()) == 0);
    CHECK(a == slurp(dir / "b" / "q0.csv"));
  }
  SECTION("radon subcommand: odd potential values vanish") {
    write_file(dir / "radon.cfg",
               "potential.kind = ambient\npotential.terms = 0 0 1 1.0\nradon.count = 8\nseed = 3\n");
    REQUIRE(run_cli("radon --config " + (dir / "radon.cfg").string() + " --out " +
                    (dir / "r").string()) == 0);
    std::ifstream in(dir / "r" / "radon.csv");
    std::string line;
    std::getline(in, line);  // digest comment
    std::getline(in, line);  // header
    int rows = 0;
    while (std::getline(in, line)) {
      // value is the 6th column
      std::stringstream ss(line);
      std::string cell;
      for (int k = 0; k < 6; ++k) std::getline(ss, cell, ',');
      CHECK(std::abs(std::stod(cell)) < 1e-10);
      ++rows;
    }
    CHECK(rows == 8);
  }
  SECTION("geodesic subcommand writes one sampled orbit") {
    write_file(dir / "geo.cfg", "geodesic.samples = 32\nic = 1.1 0.0 0.3 0.5\n");
    REQUIRE(run_cli("geodesic --config " + (dir / "geo.cfg").string() + " --out " +
                    (dir / "g").string()) == 0);
    std::string text = slurp(dir / "g" / "geodesic.csv");
    CHECK(text.find("ic,s,theta,phi,ptheta,pphi,energy,closure_defect") != std::string::npos);
  }
  SECTION("validation failures exit with code 2") {
    write_file(dir / "bad.cfg", "surface.kind = torus\n");
    CHECK(run_cli("q0 --config " + (dir / "bad.cfg").string() + " --out " + dir.string()) == 2);
    write_file(dir / "bad2.cfg", "echo.eps_exponent = 0.4\n");
    CHECK(run_cli("echo --config " + (dir / "bad2.cfg").string() + " --out " + dir.string()) == 2);
    CHECK(run_cli("q0 --config /nonexistent/file.cfg") == 2);
  }
}
