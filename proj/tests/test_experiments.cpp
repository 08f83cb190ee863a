#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmod/errors.hpp"
#include "hmod/experiments.hpp"

using namespace hmod;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(HMOD_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hmod_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config loading") {
  CHECK_THROWS_AS(RunConfig::load(data("rational_theta.json")), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(data("unknown_key.json")), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(data("corrupted.json")), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(data("missing.json")), ConfigError);

  const RunConfig c = RunConfig::load(data("small.json"));
  CHECK(c.contexts.size() == 2u);
  CHECK(c.norm == PlaneNorm::l1);
  CHECK(c.seed == 5u);
  CHECK(c.sweep_deltas() == std::vector<double>{0.25, 0.125, 0.0625});
  CHECK(c.make_contexts()[1].eth == doctest::Approx(0.3));
  CHECK(c.directions().directions.size() == 16u);
  CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());

  const RunConfig d;
  CHECK(d.sweep_deltas().size() == 10u);
  CHECK(d.sweep_deltas().back() == std::ldexp(1.0, -10));
  nlohmann::json two = {{"continuity", {{"two_sided", true}}}};
  CHECK_THROWS_AS(RunConfig::from_json(two), ConfigError);  // 0.5 - 0.5 hits p/q = 0
  two["continuity"]["deltas"] = {0.25, 0.125};
  CHECK(RunConfig::from_json(two).two_sided);
  CHECK_THROWS_AS(RunConfig::from_json({{"window", "eight"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"norm", "l2"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json({{"threads", -1}}), ConfigError);
}

TEST_CASE("CSV and manifest output") {
  const fs::path dir = scratch("csv");
  write_csv((dir / "empty.csv").string(), {"a", "b"}, {});
  CHECK(slurp(dir / "empty.csv") == "a,b\n");

  const Report rows{make_check("x", 0.1, 0.2), make_check("y", 1.0 / 3.0, 0.0, 1e-3)};
  write_report_csv((dir / "r1.csv").string(), rows);
  write_report_csv((dir / "r2.csv").string(), rows);
  CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));
  CHECK(slurp(dir / "r1.csv") ==
        "check,lhs_lower,rhs_upper,slack,pass\nx,0.10000000000000001,0.20000000000000001,0,1\n"
        "y,0.33333333333333331,0,0.001,0\n");
  CHECK(std::stod(format_double(0.1)) == 0.1);

  RunConfig c;
  c.norm = PlaneNorm::linf;
  write_manifest((dir / "m.json").string(), "verify", c, {{"net_size", 3}});
  const auto m = nlohmann::json::parse(slurp(dir / "m.json"));
  CHECK(m.at("norm") == "linf");
  CHECK(m.at("config").at("norm") == "linf");
  CHECK(m.at("calibration").at("laguerre_projection") == 1.0);
  CHECK(m.at("schema") == kManifestSchema);
  CHECK(m.at("net_size") == 3);
  CHECK_THROWS(write_csv((dir / "no" / "such" / "dir.csv").string(), {"a"}, {}));
}

TEST_CASE("random inputs are seeded") {
  Rng a(42), b(42);
  CHECK(random_sequence(a, 2, 5) == random_sequence(b, 2, 5));
  CHECK(random_wave(a, 2, 3).to_json() == random_wave(b, 2, 3).to_json());
}

TEST_CASE("worst row") {
  const Report r{make_check("a", 1.0, 2.0), make_check("b", 3.0, 2.5), make_check("c", 2.0, 1.8)};
  const CheckRow w = worst("w", r);
  CHECK(w.name == "w");
  CHECK(w.lhs_lower == 3.0);
  CHECK(!w.pass);
}

TEST_CASE("continuity sweep") {
  const Window w(4);
  const auto rows = continuity_sweep(0.5, {0.25, 0.125, 0.0}, w, false);
  REQUIRE(rows.size() == 3u);
  CHECK(rows[2].norm_diff == 0.0);
  CHECK(rows[2].gram_l1 == 0.0);
  CHECK(rows[1].gram_l1 < rows[0].gram_l1);
  for (const auto& r : check_sweep(rows, false)) CHECK(r.pass);

  const auto scaled = continuity_sweep(0.5, {0.25, 0.125, 0.0}, w, false, {}, ground_gaussian().scaled(cplx{0.0, 2.0}));
  for (int i = 0; i < 2; ++i) {
    CHECK(scaled[i].norm_diff == doctest::Approx(2.0 * rows[i].norm_diff).epsilon(1e-8));
    CHECK(scaled[i].gram_l1 == doctest::Approx(4.0 * rows[i].gram_l1).epsilon(1e-10));
  }

  const std::vector<SweepRow> rising{{0.5, 0.0, 1e-2}, {0.25, 0.0, 2e-2}};
  CHECK(!check_sweep(rising, false)[0].pass);
  const std::vector<SweepRow> end{{0.5, 0.0, 1e-2}, {0.25, 0.0, 2e-4}};
  const Report e = check_sweep(end, true);
  REQUIRE(e.size() == 2u);
  CHECK(e[1].pass);
  CHECK_THROWS_AS(continuity_sweep(0.5, {0.5}, w, true), InvalidInput);  // 0.5 - 0.5 = p/q
}
