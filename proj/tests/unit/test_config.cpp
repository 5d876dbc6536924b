#include "wsaa/error.hpp"
#include "wsaa/harness.hpp"

#include <cmath>
#include <doctest.h>
#include <filesystem>
#include <string>

using namespace wsaa;

namespace {

const std::string kBase = R"({
  "dgp": {"kind": "newsvendor"},
  "cost": {"kind": "newsvendor", "cu": 10, "co": 2},
  "box": {"lower": [0], "upper": [200]},
  "bandwidth": {"delta": 0.2, "h0": 0.6},
  "x0": {"quantile": 0.25},
  "mode": {"kind": "unconstrained", "n": [100, 1e3]}
})";

std::string
with(const std::string& base, const std::string& from, const std::string& to)
{
  std::string s = base;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

} // namespace

TEST_SUITE("config")
{
  TEST_CASE("minimal configuration and defaults")
  {
    const ExperimentConfig c = parse_experiment_config(kBase);
    CHECK(c.name == "experiment");
    CHECK(c.replications == 100);
    CHECK(c.alpha == 0.05);
    CHECK(c.oracle_n == 1000000);
    CHECK(c.workers == 1);
    CHECK_FALSE(c.timing);
    CHECK(c.kernel.family == KernelFamily::gaussian);
    CHECK(*c.h0 == 0.6);
    CHECK_FALSE(c.budgeted());
    CHECK(std::get<UnconstrainedMode>(c.mode).n_list == std::vector<std::uint64_t>{ 100, 1000 });
    CHECK_FALSE(c.source.empty());
  }

  TEST_CASE("comments are accepted")
  {
    const std::string text = "// leading comment\n" + with(kBase, "\"dgp\"", "/* block */ \"dgp\"");
    CHECK_NOTHROW(parse_experiment_config(text));
  }

  TEST_CASE("budgeted options")
  {
    const std::string b = with(kBase, R"("mode": {"kind": "unconstrained", "n": [100, 1e3]})",
                               R"("mode": {"kind": "budgeted", "gamma": [1000],
        "algorithm": {"kind": "gradient_armijo", "a": 0.45, "b": 0.9},
        "regime": {"kind": "linear", "theta": "auto"},
        "rule": "over-optimizing", "c0": "kappa_star", "kappa_tilde": 0.3, "z0": [100]})");
    const std::string e = with(b, R"("kind": "newsvendor", "cu": 10, "co": 2)", R"("kind": "expectile", "cu": 1, "co": 0.5)");
    const ExperimentConfig c = parse_experiment_config(e);
    REQUIRE(c.budgeted());
    const auto& m = std::get<BudgetedMode>(c.mode);
    CHECK(m.regime.theta() == doctest::Approx(0.7975));
    CHECK(m.rule == AllocationRule::over_optimizing);
    CHECK(m.c0_is_kappa_star);
    CHECK(*m.extras.kappa_tilde == 0.3);
    CHECK((*m.z0)[0] == 100.0);

    // theta "auto" needs the expectile cost
    CHECK_THROWS_AS(parse_experiment_config(b), ConfigError);
  }

  TEST_CASE("configuration errors")
  {
    CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("[]"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, R"("dgp": {"kind": "newsvendor"},)", "")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"newsvendor\"}", "\"lorenz\"}")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"cu\": 10", "\"cu\": -1")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "[100, 1e3]", "[4]")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "[100, 1e3]", "[100.5]")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"delta\": 0.2", "\"delta\": 0.6")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, ", \"h0\": 0.6", "")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"quantile\": 0.25", "\"quantile\": 1.5")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"lower\": [0]", "\"lower\": [0, 0]")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"x0\"", "\"replications\": 0, \"x0\"")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with(kBase, "\"x0\"", "\"alpha\": 1.0, \"x0\"")), ConfigError);
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("shipped configurations parse")
  {
    int seen = 0;
    for (const char* dir : { WSAA_CONFIG_ROOT "/acceptance", WSAA_CONFIG_ROOT "/examples" }) {
      if (!std::filesystem::exists(dir))
        continue;
      for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".json")
          continue;
        INFO(e.path().string());
        CHECK_NOTHROW(load_experiment_config(e.path().string()));
        ++seen;
      }
    }
    CHECK(seen >= 6);
  }
}
