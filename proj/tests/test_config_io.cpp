#include "doctest.h"
#include "qhd/config.hpp"
#include "qhd/errors.hpp"
#include "qhd/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

using namespace qhd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qhd_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

bool mentions(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("doubles format losslessly") {
  for (double v : {0.1, M_PI, 1.0 / 3.0, 1e300, 1e-300, -0.0, 42.0,
                   0.003730193978716297}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv roundtrip is bitwise exact") {
  TempDir tmp;
  const std::vector<double> t = {0.0, 0.1, 0.2, 1.0 / 3.0};
  const std::vector<double> y = {M_PI, -1e-300, 1e300, 0.1};
  const std::string path = tmp.file("table.csv");
  write_csv(path, {{"t", "a.u.", &t}, {"value", "bohr", &y}});
  const CsvTable tab = read_csv(path);
  REQUIRE(tab.names.size() == 2);
  CHECK(tab.names[0] == "t");
  CHECK(tab.names[1] == "value");
  REQUIRE(tab.columns.size() == 2);
  REQUIRE(tab.columns[0].size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(tab.columns[0][i] == t[i]);
    CHECK(tab.columns[1][i] == y[i]);
  }
}

TEST_CASE("csv rejects malformed input and bad targets") {
  TempDir tmp;
  const std::string path = tmp.file("bad.csv");
  write_text_atomic(path, "t,value\n1.0,2.0\n3.0,not_a_number\n");
  CHECK_THROWS_AS(read_csv(path), IOError);
  CHECK_THROWS_AS(read_csv(tmp.file("missing.csv")), IOError);
  // a target whose parent is a regular file cannot be created
  const std::string blocker = tmp.file("blocker");
  write_text_atomic(blocker, "x");
  const std::vector<double> a = {1.0};
  CHECK_THROWS_AS(write_csv(blocker + "/x.csv", {{"a", "", &a}}), IOError);
}

TEST_CASE("atomic text write lands complete and overwrites") {
  TempDir tmp;
  const std::string path = tmp.file("note.txt");
  write_text_atomic(path, "first\n");
  CHECK(read_text(path) == "first\n");
  write_text_atomic(path, "second\n");
  CHECK(read_text(path) == "second\n");
  // no temp droppings left behind
  int entries = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("minimal config gets documented defaults") {
  const RunConfig cfg = parse_config_text(R"({"command": "ground-state"})");
  CHECK(cfg.command == Command::ground_state);
  CHECK(cfg.output_dir == ".");
  CHECK(cfg.material.r_s == doctest::Approx(4.0));
  CHECK(cfg.T_e == 0.0);
  CHECK(cfg.closure.gamma == doctest::Approx(3.0));
  CHECK(cfg.closure.zeta == doctest::Approx(1.0));
  CHECK(cfg.closure.xc == XCModel::lda_exchange_plus_brey);
  CHECK(cfg.pressure == "fermi");
  CHECK(cfg.deterministic);
  // underscore alias accepted
  CHECK(parse_config_text(R"({"command": "ground_state"})").command ==
        Command::ground_state);
  CHECK(command_name(Command::variational_3d) == "variational-3d");
}

TEST_CASE("unknown keys are rejected with their path") {
  try {
    parse_config_text(R"({"command": "dynamics", "geometry": {"r_maxx": 5}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "geometry.r_maxx"));
  }
  try {
    parse_config_text(R"({"command": "dynamics", "bogus_top": 1})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "bogus_top"));
  }
}

TEST_CASE("bad enum values name the expected spellings") {
  try {
    parse_config_text(
        R"({"command": "dynamics", "closure": {"xc": "bogus"}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "lda_exchange_plus_brey"));
  }
  CHECK_THROWS_AS(parse_config_text(R"({"command": "warp"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("not json at all"), ConfigError);
}

TEST_CASE("config survives a serialize/parse roundtrip") {
  RunConfig cfg;
  cfg.command = Command::dynamics;
  cfg.output_dir = "/tmp/somewhere";
  cfg.material.r_s = 3.0;
  cfg.geometry.geometry = Geometry::spherical_radial;
  cfg.geometry.r_max = 75.0;
  cfg.geometry.n_points = 1024;
  cfg.shell.R = 40.0;
  cfg.shell.Delta = 10.0;
  cfg.closure.xc = XCModel::none;
  cfg.closure.zeta = 0.5;
  cfg.kick.tau = 0.2;
  cfg.numerics.t_end = 123.0;
  cfg.var3d.delta = 3.0;
  const RunConfig back = parse_config_text(config_to_json(cfg));
  CHECK(back.command == Command::dynamics);
  CHECK(back.output_dir == cfg.output_dir);
  CHECK(back.material.r_s == cfg.material.r_s);
  CHECK(back.geometry.r_max == cfg.geometry.r_max);
  CHECK(back.geometry.n_points == cfg.geometry.n_points);
  CHECK(back.shell.R == cfg.shell.R);
  CHECK(back.shell.Delta == cfg.shell.Delta);
  CHECK(back.closure.xc == XCModel::none);
  CHECK(back.closure.zeta == cfg.closure.zeta);
  CHECK(back.kick.tau == cfg.kick.tau);
  CHECK(back.numerics.t_end == cfg.numerics.t_end);
  CHECK(back.var3d.delta == cfg.var3d.delta);
}

TEST_CASE("metadata records parse back to the embedded config") {
  RunConfig cfg;
  cfg.command = Command::spectrum_cmd;
  cfg.spectrum.input_csv = "dyn.csv";
  cfg.spectrum.min_prominence = 0.25;
  const std::string meta = std::string("{\"tool\": \"qhd\", \"diagnostics\": ") +
                           "{\"n\": 3}, \"config\": " + config_to_json(cfg) +
                           "}";
  const RunConfig back = parse_config_text(meta);
  CHECK(back.command == Command::spectrum_cmd);
  CHECK(back.spectrum.input_csv == "dyn.csv");
  CHECK(back.spectrum.min_prominence == 0.25);

  TempDir tmp;
  const std::string path = tmp.file("metadata.json");
  write_text_atomic(path, meta);
  CHECK(parse_config_file(path).spectrum.input_csv == "dyn.csv");
}

TEST_CASE("flattened overrides reach nested fields") {
  RunConfig base;
  std::map<std::string, std::string> kv = {
      {"well.A", "2.5"},
      {"closure.xc", "none"},
      {"numerics.t_end", "42"},
      {"command", "variational-1d"},
  };
  const RunConfig out = apply_overrides(base, kv);
  CHECK(out.command == Command::variational_1d);
  CHECK(out.well.A == doctest::Approx(2.5));
  CHECK(out.closure.xc == XCModel::none);
  CHECK(out.numerics.t_end == doctest::Approx(42.0));
  CHECK(base.well.A == doctest::Approx(1.0));  // base untouched
  CHECK_THROWS_AS(apply_overrides(base, {{"no.such.key", "1"}}), ConfigError);
}
