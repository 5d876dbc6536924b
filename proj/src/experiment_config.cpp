#include "wsaa/error.hpp"
#include "wsaa/harness.hpp"
#include "wsaa/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace wsaa {

namespace {

using nlohmann::json;

[[noreturn]] void
fail(const std::string& where, const std::string& what)
{
  throw ConfigError(where + ": " + what);
}

const json&
require(const json& j, const char* key, const std::string& where)
{
  if (!j.is_object() || !j.contains(key))
    fail(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

double
number(const json& j, const std::string& where)
{
  if (!j.is_number())
    fail(where, "expected a number");
  return j.get<double>();
}

double
number_or(const json& j, const char* key, double fallback, const std::string& where)
{
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

std::uint64_t
count(const json& j, const std::string& where)
{
  if (j.is_number_unsigned())
    return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  // Allow 1e4 style literals when they are exact integers.
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19)
      return static_cast<std::uint64_t>(v);
  }
  fail(where, "expected a nonnegative integer");
}

Eigen::VectorXd
vector_of(const json& j, const std::string& where)
{
  if (!j.is_array() || j.empty())
    fail(where, "expected a nonempty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<double>
list_of(const json& j, const std::string& where)
{
  const Eigen::VectorXd v = vector_of(j, where);
  return { v.data(), v.data() + v.size() };
}

std::string
kind_of(const json& j, const std::string& where)
{
  const json& k = require(j, "kind", where);
  if (!k.is_string())
    fail(where + ".kind", "expected a string");
  return k.get<std::string>();
}

Simulator
parse_dgp(const json& j)
{
  const std::string w = "dgp";
  const std::string kind = kind_of(j, w);
  if (kind == "newsvendor") {
    NewsvendorDgp d;
    d.x1_mean = number_or(j, "x1_mean", d.x1_mean, w);
    d.x1_sd = number_or(j, "x1_sd", d.x1_sd, w);
    d.x2_log_mean = number_or(j, "x2_log_mean", d.x2_log_mean, w);
    d.x2_log_sd = number_or(j, "x2_log_sd", d.x2_log_sd, w);
    d.base = number_or(j, "base", d.base, w);
    d.noise_sd = number_or(j, "noise_sd", d.noise_sd, w);
    return Simulator(d);
  }
  if (kind == "quartic") {
    QuarticDgp d;
    d.x1_mean = number_or(j, "x1_mean", d.x1_mean, w);
    d.x1_sd = number_or(j, "x1_sd", d.x1_sd, w);
    d.x2_mean = number_or(j, "x2_mean", d.x2_mean, w);
    d.x2_sd = number_or(j, "x2_sd", d.x2_sd, w);
    d.noise_sd = number_or(j, "noise_sd", d.noise_sd, w);
    return Simulator(d);
  }
  if (kind == "weather") {
    WeatherDgp d;
    d.temp_mean = number_or(j, "temp_mean", d.temp_mean, w);
    d.temp_sd = number_or(j, "temp_sd", d.temp_sd, w);
    d.wind_log_mean = number_or(j, "wind_log_mean", d.wind_log_mean, w);
    d.wind_log_sd = number_or(j, "wind_log_sd", d.wind_log_sd, w);
    d.base_demand = number_or(j, "base_demand", d.base_demand, w);
    d.peak_demand = number_or(j, "peak_demand", d.peak_demand, w);
    d.peak_temp = number_or(j, "peak_temp", d.peak_temp, w);
    d.temp_width = number_or(j, "temp_width", d.temp_width, w);
    d.wind_scale = number_or(j, "wind_scale", d.wind_scale, w);
    d.noise_log_sd = number_or(j, "noise_log_sd", d.noise_log_sd, w);
    return Simulator(d);
  }
  if (kind == "uniform") {
    UniformDgp d;
    d.d_x = static_cast<int>(j.contains("d_x") ? count(j.at("d_x"), "dgp.d_x") : 1);
    d.lo = number_or(j, "lo", d.lo, w);
    d.hi = number_or(j, "hi", d.hi, w);
    return Simulator(d);
  }
  fail(w + ".kind", "unknown process '" + kind + "'");
}

CostModel
parse_cost(const json& j)
{
  const std::string w = "cost";
  const std::string kind = kind_of(j, w);
  if (kind == "newsvendor")
    return CostModel::newsvendor(number(require(j, "cu", w), w + ".cu"), number(require(j, "co", w), w + ".co"));
  if (kind == "expectile")
    return CostModel::expectile(number(require(j, "cu", w), w + ".cu"), number(require(j, "co", w), w + ".co"));
  if (kind == "quartic") {
    if (j.contains("a") || j.contains("b"))
      return CostModel::quartic(vector_of(require(j, "a", w), w + ".a"), vector_of(require(j, "b", w), w + ".b"));
    const auto d = static_cast<int>(count(require(j, "d", w), w + ".d"));
    RngStream rng(count(require(j, "seed", w), w + ".seed"), 0);
    return make_quartic_cost(d, rng);
  }
  fail(w + ".kind", "unknown cost '" + kind + "'");
}

SolverAlgorithm
parse_algorithm(const json& j)
{
  const std::string w = "mode.algorithm";
  const std::string kind = kind_of(j, w);
  if (kind == "subgradient")
    return SubgradientMethod{ number(require(j, "mu0", w), w + ".mu0") };
  if (kind == "gradient_armijo")
    return GradientArmijo{ number(require(j, "a", w), w + ".a"), number(require(j, "b", w), w + ".b") };
  if (kind == "newton_armijo")
    return NewtonArmijo{ number(require(j, "a", w), w + ".a"), number(require(j, "b", w), w + ".b") };
  fail(w + ".kind", "unknown algorithm '" + kind + "'");
}

ConvergenceClass
parse_regime(const json& j, const SolverAlgorithm& alg, const CostModel& cost)
{
  const std::string w = "mode.regime";
  const std::string kind = kind_of(j, w);
  if (kind == "sublinear")
    return ConvergenceClass::sublinear(number(require(j, "beta", w), w + ".beta"));
  if (kind == "linear") {
    const json& t = require(j, "theta", w);
    if (t.is_string() && t.get<std::string>() == "auto") {
      // Strong convexity 2 c_o and smoothness 2 c_u of the expectile cost.
      const auto* ex = cost.as<ExpectileCost>();
      const auto* ga = std::get_if<GradientArmijo>(&alg);
      if (!ex || !ga)
        fail(w + ".theta", "'auto' needs the expectile cost with gradient_armijo");
      return ConvergenceClass::linear(theta_for_projected_gd(2.0 * ex->co, 2.0 * ex->cu, ga->a, ga->b));
    }
    return ConvergenceClass::linear(number(t, w + ".theta"));
  }
  if (kind == "superlinear")
    return ConvergenceClass::superlinear(number_or(j, "theta", 1.0, w), number(require(j, "eta", w), w + ".eta"));
  fail(w + ".kind", "unknown regime '" + kind + "'");
}

std::vector<std::uint64_t>
grid_of(const json& j, const std::string& where)
{
  if (!j.is_array() || j.empty())
    fail(where, "expected a nonempty array");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(count(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::variant<UnconstrainedMode, BudgetedMode>
parse_mode(const json& j, const CostModel& cost)
{
  const std::string w = "mode";
  const std::string kind = kind_of(j, w);
  if (kind == "unconstrained")
    return UnconstrainedMode{ grid_of(require(j, "n", w), w + ".n") };
  if (kind != "budgeted")
    fail(w + ".kind", "expected 'unconstrained' or 'budgeted'");

  const SolverAlgorithm alg = parse_algorithm(require(j, "algorithm", w));
  BudgetedMode b{ grid_of(require(j, "gamma", w), w + ".gamma"), alg, parse_regime(require(j, "regime", w), alg, cost) };
  if (j.contains("rule")) {
    if (!j.at("rule").is_string())
      fail(w + ".rule", "expected a string");
    try {
      b.rule = parse_allocation_rule(j.at("rule").get<std::string>());
    } catch (const InvalidArgument& e) {
      fail(w + ".rule", e.what());
    }
  }
  if (j.contains("c0")) {
    const json& c0 = j.at("c0");
    if (c0.is_string()) {
      if (c0.get<std::string>() != "kappa_star")
        fail(w + ".c0", "expected a number or \"kappa_star\"");
      b.c0_is_kappa_star = true;
    } else {
      b.extras.c0 = number(c0, w + ".c0");
    }
  }
  if (j.contains("kappa_tilde"))
    b.extras.kappa_tilde = number(j.at("kappa_tilde"), w + ".kappa_tilde");
  if (j.contains("kappa_override"))
    b.extras.kappa_override = number(j.at("kappa_override"), w + ".kappa_override");
  if (j.contains("kappa_scale"))
    b.kappa_scale = number(j.at("kappa_scale"), w + ".kappa_scale");
  if (j.contains("z0"))
    b.z0 = vector_of(j.at("z0"), w + ".z0");
  return b;
}

} // namespace

void
ExperimentConfig::validate() const
{
  if (replications < 1)
    throw ConfigError("replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (oracle_n < 1)
    throw ConfigError("oracle_n must be >= 1");
  if (dgp.d_y() != cost.d_y())
    throw ConfigError("process outcome dimension " + std::to_string(dgp.d_y()) +
                      " does not match the cost dimension " + std::to_string(cost.d_y()));
  if (box.dim() != cost.d_z())
    throw ConfigError("box dimension does not match the decision dimension");
  if (!(delta > 0.0 && delta * dgp.d_x() < 1.0))
    throw ConfigError("bandwidth delta must lie in (0, 1/d_x)");
  if (!h0 && !cv)
    throw ConfigError("bandwidth needs h0 or a cv section");
  if (h0 && !(*h0 > 0.0))
    throw ConfigError("h0 must be positive");
  if (!x0.value && !x0.quantile)
    throw ConfigError("x0 needs a value or a quantile");
  if (x0.value && x0.value->size() != dgp.d_x())
    throw ConfigError("x0 has the wrong dimension");
  if (x0.quantile && !(*x0.quantile > 0.0 && *x0.quantile < 1.0))
    throw ConfigError("x0 quantile must lie in (0, 1)");
  if (cv && cv->k < 2)
    throw ConfigError("cv.k must be >= 2");

  if (const auto* u = std::get_if<UnconstrainedMode>(&mode)) {
    if (u->n_list.empty())
      throw ConfigError("mode.n must be nonempty");
    for (auto n : u->n_list)
      if (n < 8)
        throw ConfigError("every n must be >= 8");
    if (cv && (!cv->mu0_grid.empty() || !cv->z0_grid.empty()))
      throw ConfigError("cv can only tune mu0 and z0 in budgeted mode");
  } else {
    const auto& b = std::get<BudgetedMode>(mode);
    if (b.gamma_list.empty())
      throw ConfigError("mode.gamma must be nonempty");
    for (auto g : b.gamma_list)
      if (g < 8)
        throw ConfigError("every gamma must be >= 8");
    try {
      SolverConfig{ b.algorithm, 1, box.midpoint() }.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("mode.algorithm: ") + e.what());
    }
    if (std::holds_alternative<SubgradientMethod>(b.algorithm) && cost.differentiable())
      throw ConfigError("the subgradient method is meant for the newsvendor cost");
    if (!std::holds_alternative<SubgradientMethod>(b.algorithm) && !cost.differentiable())
      throw ConfigError("Armijo solvers need a differentiable cost");
    if (b.z0 && (b.z0->size() != cost.d_z() || !box.contains(*b.z0)))
      throw ConfigError("mode.z0 must be a point of the box");
    if (b.kappa_scale && !(*b.kappa_scale > 0.0))
      throw ConfigError("kappa_scale must be positive");
    if (cv && !cv->mu0_grid.empty() && !std::holds_alternative<SubgradientMethod>(b.algorithm))
      throw ConfigError("cv.mu0_grid applies to the subgradient method only");
    if (cv)
      for (const auto& z : cv->z0_grid)
        if (z.size() != cost.d_z() || !box.contains(z))
          throw ConfigError("cv.z0_grid entries must be points of the box");
  }
}

ExperimentConfig
parse_experiment_config(const std::string& text)
{
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");

  try {
    Simulator dgp = parse_dgp(require(j, "dgp", "config"));
    CostModel cost = parse_cost(require(j, "cost", "config"));
    const json& bj = require(j, "box", "config");
    FeasibleBox box(vector_of(require(bj, "lower", "box"), "box.lower"),
                    vector_of(require(bj, "upper", "box"), "box.upper"));

    ExperimentConfig cfg{ .dgp = std::move(dgp),
                          .cost = std::move(cost),
                          .box = std::move(box),
                          .mode = UnconstrainedMode{} };
    if (j.contains("name")) {
      if (!j.at("name").is_string())
        fail("name", "expected a string");
      cfg.name = j.at("name").get<std::string>();
    }
    if (j.contains("kernel")) {
      if (!j.at("kernel").is_string())
        fail("kernel", "expected a string");
      cfg.kernel.family = parse_kernel_family(j.at("kernel").get<std::string>());
    }

    const json& bw = require(j, "bandwidth", "config");
    cfg.delta = number(require(bw, "delta", "bandwidth"), "bandwidth.delta");
    if (bw.contains("h0"))
      cfg.h0 = number(bw.at("h0"), "bandwidth.h0");

    if (j.contains("cv")) {
      const json& c = j.at("cv");
      CvConfig cv;
      if (c.contains("h0_grid"))
        cv.h0_grid = list_of(c.at("h0_grid"), "cv.h0_grid");
      if (c.contains("mu0_grid"))
        cv.mu0_grid = list_of(c.at("mu0_grid"), "cv.mu0_grid");
      if (c.contains("z0_grid")) {
        const json& zg = c.at("z0_grid");
        if (!zg.is_array() || zg.empty())
          fail("cv.z0_grid", "expected a nonempty array of points");
        for (std::size_t i = 0; i < zg.size(); ++i)
          cv.z0_grid.push_back(vector_of(zg[i], "cv.z0_grid[" + std::to_string(i) + "]"));
      }
      if (c.contains("k"))
        cv.k = static_cast<int>(count(c.at("k"), "cv.k"));
      cfg.cv = std::move(cv);
    }

    const json& xj = require(j, "x0", "config");
    if (xj.contains("value"))
      cfg.x0.value = vector_of(xj.at("value"), "x0.value");
    else
      cfg.x0.quantile = number(require(xj, "quantile", "x0"), "x0.quantile");

    cfg.mode = parse_mode(require(j, "mode", "config"), cfg.cost);
    if (j.contains("replications"))
      cfg.replications = count(j.at("replications"), "replications");
    cfg.alpha = number_or(j, "alpha", cfg.alpha, "config");
    if (j.contains("base_seed"))
      cfg.base_seed = count(j.at("base_seed"), "base_seed");
    if (j.contains("oracle_n"))
      cfg.oracle_n = count(j.at("oracle_n"), "oracle_n");
    if (j.contains("workers"))
      cfg.workers = count(j.at("workers"), "workers");
    if (j.contains("timing")) {
      if (!j.at("timing").is_boolean())
        fail("timing", "expected a boolean");
      cfg.timing = j.at("timing").get<bool>();
    }
    cfg.source = j.dump();
    cfg.validate();
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig
load_experiment_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

} // namespace wsaa
