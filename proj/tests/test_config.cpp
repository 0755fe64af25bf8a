#include <doctest.h>

#include <sstream>

#include "honls/config.hpp"

using namespace honls::config;

namespace {

RunConfig parse_str(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_str(
      "honls-config v1\n"
      "# comment line\n"
      "equation.order = 3\n"
      "equation.sign = -1\n"
      "solver.N = 500   # trailing comment\n"
      "solver.J = 3\n"
      "solver.K = 8\n"
      "solver.T = 0.25\n"
      "norms.q = 2\n"
      "norms.s = 0.5\n"
      "init.modes = 0:0.1:0, 2:-0.05:0.025\n"
      "census.grid = 10,100\n"
      "seed = 42\n");
  CHECK(cfg.order == 3);
  CHECK(cfg.sign == -1);
  CHECK(cfg.N == 500);
  CHECK(cfg.J == 3);
  CHECK(cfg.K == 8);
  CHECK(cfg.T == doctest::Approx(0.25));
  CHECK(cfg.s == doctest::Approx(0.5));
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.init_modes.size() == 2);
  CHECK(cfg.init_modes[1].n == 2);
  CHECK(cfg.init_modes[1].im == doctest::Approx(0.025));
  CHECK(cfg.census_grid == std::vector<long long>{10, 100});
  // defaults survive for unset keys
  CHECK(cfg.quad_rule == 4);
  CHECK(cfg.dt == doctest::Approx(1e-3));

  const auto state = cfg.initial_state();
  CHECK(state.at(0).real() == doctest::Approx(0.1));
  CHECK(state.at(2).imag() == doctest::Approx(0.025));
}

TEST_CASE("config rejection") {
  CHECK_THROWS_AS(parse_str(""), ConfigError);
  CHECK_THROWS_AS(parse_str("not-a-header\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\nbogus.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\nseed\n"), ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\nseed = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\nseed = 1\nseed = 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\nequation.sign = 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_str("honls-config v1\ninit.modes = 1:2\n"),
                  ConfigError);
}

TEST_CASE("serialization round trip is idempotent") {
  const RunConfig cfg = parse_str(
      "honls-config v1\n"
      "equation.weights = 1/2, 0, 2\n"
      "solver.N = 250\n"
      "solver.tol = 1e-9\n"
      "init.modes = -1:0.25:-0.5\n"
      "output_dir = out/run1\n");
  const std::string once = serialize_config(cfg);
  std::istringstream is(once);
  const RunConfig reparsed = parse_config(is);
  CHECK(serialize_config(reparsed) == once);
  CHECK(reparsed.weights.size() == 3);
  CHECK(reparsed.weights[0] == honls::phase::Rat(1, 2));
  CHECK(reparsed.tol == doctest::Approx(1e-9));
  CHECK(reparsed.output_dir == "out/run1");
}

TEST_CASE("derived specs") {
  RunConfig cfg;
  cfg.order = 2;
  cfg.sign = -1;
  const auto spec = cfg.equation_spec();
  CHECK(spec.sign == -1);
  CHECK(spec.weights.eps.size() == 2);
  CHECK(spec.weights.eps[1] == 1);

  const auto nfr = cfg.nfr_config();
  CHECK(nfr.N == cfg.N);
  CHECK(nfr.J == cfg.J);

  cfg.init_modes = {{99, 1.0, 0.0}};
  CHECK_THROWS_AS(cfg.initial_state(), ConfigError);

  RunConfig bad;
  bad.order = 9;
  CHECK_THROWS_AS(bad.equation_spec(), ConfigError);
}
