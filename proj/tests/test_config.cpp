#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "semrad/error.hpp"

using semrad::ConfigError;
using semrad::cli::Config;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("flat config: typed access and resolved values") {
  Config c = Config::parse(
      "# comment\n"
      "geometry.R = 0.5   # radius\n"
      "discretization.P = 1-3, 6\n"
      "output.monitors = 0.5, 2\n"
      "absorption.sommerfeld = off\n"
      "geometry.type = cylinder\n");
  CHECK(c.positive("geometry.R") == 0.5);
  CHECK(c.integers("discretization.P", {}) == std::vector<int>{1, 2, 3, 6});
  CHECK(c.numbers("output.monitors", {}) == std::vector<double>{0.5, 2.0});
  CHECK_FALSE(c.flag("absorption.sommerfeld", true));
  CHECK(c.choice("geometry.type", {"cylinder", "box"}, "") == "cylinder");
  CHECK(c.number("geometry.h", 3.0) == 3.0);
  CHECK(c.resolved().at("geometry.h") == "3");
  CHECK(c.resolved().at("discretization.P") == "1,2,3,6");
  CHECK_NOTHROW(c.finish("radiate"));
}

TEST_CASE("JSON config flattens to the same keys") {
  Config c = Config::parse(R"({"geometry": {"type": "box", "a": 0.5, "n_side": 4},
                                 "output": {"monitors": [0.5, 1]}, "run": {"threads": 2}})");
  CHECK(c.text("geometry.type") == "box");
  CHECK(c.positive("geometry.a") == 0.5);
  CHECK(c.integer("geometry.n_side", 0) == 4);
  CHECK(c.numbers("output.monitors", {}) == std::vector<double>{0.5, 1.0});
  CHECK(c.integer("run.threads", 0) == 2);
  CHECK_THROWS_AS(Config::parse(R"({"geometry": 3})"), ConfigError);
  CHECK_THROWS_AS(Config::parse(R"({"geometry": {"R": {"x": 1}}})"), ConfigError);
  CHECK_THROWS_AS(Config::parse("{ broken"), ConfigError);
}

TEST_CASE("config errors name the key") {
  CHECK(error_of([] { Config::parse("geometry.R = 1\ngeometry.R = 2\n", "a.cfg"); })
            .find("a.cfg:2") != std::string::npos);
  CHECK(error_of([] { Config::parse("R = 1\n"); }).find("'R'") != std::string::npos);
  CHECK(error_of([] { Config::parse("geometry.R 1\n"); }).find("expected") != std::string::npos);

  Config c = Config::parse("geometry.R = abc\ngeometry.h = -1\ngeometry.beta = 2.5\nrun.x = 1\n");
  CHECK(error_of([&] { c.number("geometry.R"); }).find("geometry.R") != std::string::npos);
  CHECK(error_of([&] { c.positive("geometry.h"); }).find("geometry.h: must be positive") !=
        std::string::npos);
  CHECK(error_of([&] { c.integer("geometry.beta", 5); }).find("geometry.beta") != std::string::npos);
  CHECK(error_of([&] { c.number("geometry.L"); }).find("missing required key 'geometry.L'") !=
        std::string::npos);
  CHECK(error_of([&] { c.finish("radiate"); }).find("unknown key 'run.x'") != std::string::npos);
  CHECK(error_of([&] { c.choice("geometry.type", {"box"}, "cylinder"); }).find("geometry.type") !=
        std::string::npos);
  CHECK(error_of([&] { c.integers("discretization.P", {}); }).empty());
  Config r = Config::parse("discretization.P = 5-2\n");
  CHECK_FALSE(error_of([&] { r.integers("discretization.P", {}); }).empty());
}

TEST_CASE("overrides replace file values") {
  Config c = Config::parse("geometry.R = 1\n");
  c.set_override("geometry.R=2");
  c.set_override("geometry.h = 3");
  CHECK(c.number("geometry.R") == 2.0);
  CHECK(c.number("geometry.h") == 3.0);
  CHECK_THROWS_AS(c.set_override("geometry.R"), ConfigError);
  CHECK_THROWS_AS(c.set_override("R=1"), ConfigError);
}

TEST_CASE("commands reject bad configurations before running") {
  Config missing = Config::parse("geometry.type = cylinder\ngeometry.R = 0.5\ngeometry.L = 8\n");
  CHECK(error_of([&] { semrad::cli::run_command("radiate", missing); })
            .find("geometry.h") != std::string::npos);

  Config both = Config::parse(
      "geometry.type = cylinder\ngeometry.R = 0.5\ngeometry.h = 3\ngeometry.L = 8\n"
      "impulse.alpha = 3\nimpulse.s = 1\n");
  CHECK(error_of([&] { semrad::cli::run_command("radiate", both); }).find("impulse.s") !=
        std::string::npos);

  Config stray = Config::parse(
      "geometry.type = box\ngeometry.a = 0.5\ngeometry.d = 0.5\ngeometry.h = 3\ngeometry.L = 8\n"
      "geometry.beta = 5\n");
  CHECK(error_of([&] { semrad::cli::run_command("radiate", stray); })
            .find("unknown key 'geometry.beta'") != std::string::npos);

  Config wrong = Config::parse("geometry.type = basin\ngeometry.L = 10\ngeometry.h = 2\n");
  CHECK(error_of([&] { semrad::cli::run_command("radiate", wrong); }).find("geometry.type") !=
        std::string::npos);
  CHECK_THROWS_AS(semrad::cli::run_command("plot", wrong), ConfigError);
}

TEST_CASE("stability command writes tables with units") {
  const auto dir = std::filesystem::temp_directory_path() / "semrad_config_test";
  std::filesystem::remove_all(dir);
  Config c = Config::parse("geometry.type = basin\ngeometry.L = 10\ngeometry.h = 2\n"
                           "discretization.P = 2\n");
  c.set("output.directory", dir.string());
  CHECK(semrad::cli::run_command("stability", c) == 0);
  std::ifstream in(dir / "stability.csv");
  std::string line, header;
  while (std::getline(in, line))
    if (line.rfind("#", 0) != 0) {
      header = line;
      break;
    }
  CHECK(header == "P,surface_nodes,max_re [1/s],max_abs [1/s],ratio [-],stable");
  std::getline(in, line);
  CHECK(line.substr(line.size() - 1) == "1");
  CHECK(std::filesystem::exists(dir / "sloshing.csv"));
  CHECK(std::filesystem::exists(dir / "run.json"));
  std::filesystem::remove_all(dir);
}
