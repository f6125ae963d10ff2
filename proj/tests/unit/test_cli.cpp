#include <doctest.h>

#include <sys/wait.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "geoamp/errors.hpp"
#include "geoamp/oscillatory.hpp"
#include "lab/config.hpp"
#include "lab/output.hpp"

using namespace geoamp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("geoamp_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(GEOAMP_LAB_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("FNV-1a 64 reference vectors") {
    CHECK(lab::hex64(lab::fnv1a64("")) == "cbf29ce484222325");
    CHECK(lab::hex64(lab::fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(lab::hex64(lab::fnv1a64("foobar")) == "85944171f73967e8");
  }

  TEST_CASE("CSV quoting and number formatting") {
    CHECK(lab::csv_field("plain") == "plain");
    CHECK(lab::csv_field("a,b") == "\"a,b\"");
    CHECK(lab::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(lab::csv_field("two\nlines") == "\"two\nlines\"");
    for (double v : {0.1, -1e-300, 3.0, 123456.789}) {
      const std::string s = lab::format_double(v);
      double back = 0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
    }
  }

  TEST_CASE("group element forms") {
    const auto a = lab::parse_config("g = [2.0, 0.0, 0.0, 0.5]", "test");
    CHECK(lab::parse_group(a).max_abs_diff(mat_a(2 * std::log(2.0))) < 1e-12);
    const auto b = lab::parse_config("group = [[\"a\", 0.3], [\"k\", 1.1], [\"n\", -0.2]]", "test");
    CHECK(lab::parse_group(b).max_abs_diff(mat_a(0.3) * mat_k(1.1) * mat_n(-0.2)) < 1e-15);
    const auto c = lab::parse_config("[geometry]\nkind = \"ultraparallel\"\nn = 0.5\ny1 = 0.1\ny2 = 0.2", "test");
    CHECK(lab::parse_group(c).max_abs_diff(ultraparallel_pair(0.5, 0.1, 0.2)) < 1e-15);
    CHECK_THROWS_AS(lab::parse_group(lab::parse_config("g = [1.0, 1.0, 1.0, 1.0]", "test")), ConfigInvalid);
    CHECK_THROWS_AS(lab::parse_group(lab::parse_config("group = [[\"z\", 1.0]]", "test")), ConfigInvalid);
    CHECK_THROWS_AS(lab::parse_group(lab::parse_config("x = 1", "test")), ConfigInvalid);
    CHECK_THROWS_AS(lab::parse_config("= broken", "test"), ConfigInvalid);
  }

  TEST_CASE("grids") {
    const auto s = lab::parse_s_grid(lab::parse_config("s_min = 100.0\ns_max = 400.0\ncount = 3", "test"));
    REQUIRE(s.size() == 3);
    CHECK(s[1] == doctest::Approx(200.0));
    const auto n = lab::parse_n_grid(lab::parse_config("n_max = 100\nn_dense = 4\nn_log_points = 2", "test"));
    CHECK(n == std::vector<std::int64_t>{1, 2, 3, 4, 20, 100});
    CHECK_THROWS_AS(lab::get_doubles(lab::parse_config("kappa = []", "test"), "kappa"), ConfigInvalid);
    CHECK(lab::get_rational(lab::parse_config("theta = \"7/64\"", "test"), "theta") == Rational(7, 64));
  }

  TEST_CASE("empty kappa list exits with code 2") {
    TempDir d("kappa");
    const fs::path cfg = d.path / "bad.toml";
    std::ofstream(cfg) << "order = \"" GEOAMP_SOURCE_DIR "/configs/order_2_-11.toml\"\n"
                       << "[geodesic]\ngroup = [[\"a\", 0.2]]\nlength = 1.0\n"
                       << "[count]\nn = [1, 2]\nkappa = []\n";
    CHECK(run("hecke-count --config " + cfg.string() + " --out " + (d.path / "out").string(), d.path / "log") == 2);
    CHECK(run("kernel-profile --config " + (d.path / "missing.toml").string() + " --out " + (d.path / "o2").string(),
              d.path / "log2") == 2);
  }

  TEST_CASE("critical-points output is byte-identical across runs") {
    TempDir d("repeat");
    const std::string cfg = GEOAMP_SOURCE_DIR "/configs/critical_points.toml";
    REQUIRE(run("critical-points --config " + cfg + " --out " + (d.path / "a").string(), d.path / "la") == 0);
    REQUIRE(run("critical-points --config " + cfg + " --out " + (d.path / "b").string(), d.path / "lb") == 0);
    const std::string a = slurp(d.path / "a" / "critical_points.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(d.path / "b" / "critical_points.csv"));
    CHECK(fs::exists(d.path / "a" / "run_manifest.json"));
  }

  TEST_CASE("exponent-opt main prints 3/14") {
    TempDir d("expo");
    REQUIRE(run("exponent-opt main --out " + (d.path / "o").string(), d.path / "log") == 0);
    CHECK(slurp(d.path / "log").find("3/14") != std::string::npos);
  }
}
