// Command-line front end: solve, infer, allocate, cv, sample, experiment.

#include "wsaa/budget.hpp"
#include "wsaa/error.hpp"
#include "wsaa/harness.hpp"
#include "wsaa/infer.hpp"
#include "wsaa/simulate.hpp"
#include "wsaa/solve.hpp"
#include "wsaa/tune.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;

struct ProblemOptions
{
  std::string data;
  std::vector<double> x0;
  std::string cost = "newsvendor";
  double cu = 10.0;
  double co = 2.0;
  std::vector<double> qa, qb;
  std::vector<double> lower, upper;
  std::string kernel = "gaussian";
  double h0 = 1.0;
  double delta = 0.2;
};

struct SolverOptions
{
  std::string algorithm = "exact";
  std::size_t iters = 0;
  double mu0 = 1.0;
  double a = 0.1;
  double b = 0.9;
  std::vector<double> z0;
};

Eigen::VectorXd
to_vec(const std::vector<double>& v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json
to_json(const Eigen::VectorXd& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

json
finite_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

void
add_problem_options(CLI::App* app, ProblemOptions& o)
{
  app->add_option("--data", o.data, "dataset CSV (x1..,y1..)")->required();
  app->add_option("--x0", o.x0, "query covariate, comma separated")->required()->delimiter(',');
  app->add_option("--cost", o.cost, "newsvendor | expectile | quartic")
    ->check(CLI::IsMember({ "newsvendor", "expectile", "quartic" }));
  app->add_option("--cu", o.cu, "underage cost");
  app->add_option("--co", o.co, "overage cost");
  app->add_option("--qa", o.qa, "quartic coefficients a")->delimiter(',');
  app->add_option("--qb", o.qb, "quartic coefficients b")->delimiter(',');
  app->add_option("--lower", o.lower, "box lower bounds")->required()->delimiter(',');
  app->add_option("--upper", o.upper, "box upper bounds")->required()->delimiter(',');
  app->add_option("--kernel", o.kernel, "uniform | epanechnikov | gaussian");
  app->add_option("--h0", o.h0, "bandwidth constant");
  app->add_option("--delta", o.delta, "bandwidth exponent");
}

void
add_solver_options(CLI::App* app, SolverOptions& s)
{
  app->add_option("--algorithm", s.algorithm, "exact | subgradient | gradient_armijo | newton_armijo")
    ->check(CLI::IsMember({ "exact", "subgradient", "gradient_armijo", "newton_armijo" }));
  app->add_option("--iters", s.iters, "iteration budget m");
  app->add_option("--mu0", s.mu0, "subgradient step constant");
  app->add_option("--a", s.a, "Armijo sufficient-decrease constant");
  app->add_option("--b", s.b, "Armijo shrink factor");
  app->add_option("--z0", s.z0, "initial point (default: box midpoint)")->delimiter(',');
}

wsaa::CostModel
make_cost(const ProblemOptions& o)
{
  if (o.cost == "newsvendor")
    return wsaa::CostModel::newsvendor(o.cu, o.co);
  if (o.cost == "expectile")
    return wsaa::CostModel::expectile(o.cu, o.co);
  return wsaa::CostModel::quartic(to_vec(o.qa), to_vec(o.qb));
}

struct LoadedProblem
{
  wsaa::Dataset data;
  wsaa::WsaaProblem problem;
  double h;
  int d_x;
};

LoadedProblem
load_problem(const ProblemOptions& o)
{
  wsaa::Dataset data = wsaa::load_dataset_csv(o.data);
  const int d_x = static_cast<int>(data.X.cols());
  const wsaa::BandwidthSchedule sched(o.h0, o.delta, d_x);
  if (sched.outside_debiasing_range())
    std::cerr << "warning: delta <= 1/(d_x + 4); intervals may undercover\n";
  const double h = wsaa::bandwidth(sched, static_cast<std::size_t>(data.size()));
  const wsaa::KernelSpec kernel{ wsaa::parse_kernel_family(o.kernel) };
  wsaa::WeightVector w = wsaa::nw_weights(data.X, to_vec(o.x0), kernel, h);
  wsaa::WsaaProblem p(data.Y, std::move(w), make_cost(o), wsaa::FeasibleBox(to_vec(o.lower), to_vec(o.upper)));
  return { std::move(data), std::move(p), h, d_x };
}

struct Solved
{
  Eigen::VectorXd z;
  double value;
  std::size_t iterations;
};

Solved
solve_with(const wsaa::WsaaProblem& p, const SolverOptions& s)
{
  if (s.algorithm == "exact") {
    auto e = wsaa::solve_exact(p);
    return { e.z, e.value, e.iterations };
  }
  wsaa::SolverAlgorithm alg = wsaa::SubgradientMethod{ s.mu0 };
  if (s.algorithm == "gradient_armijo")
    alg = wsaa::GradientArmijo{ s.a, s.b };
  else if (s.algorithm == "newton_armijo")
    alg = wsaa::NewtonArmijo{ s.a, s.b };
  const Eigen::VectorXd z0 = s.z0.empty() ? p.box().midpoint() : to_vec(s.z0);
  const auto trace = wsaa::run_solver(p, { alg, s.iters, z0 });
  return { trace.delivered(), trace.delivered_objective(), trace.iterations_used };
}

wsaa::ConvergenceClass
make_regime(const std::string& kind, double beta, double theta, double eta)
{
  if (kind == "sublinear")
    return wsaa::ConvergenceClass::sublinear(beta);
  if (kind == "linear")
    return wsaa::ConvergenceClass::linear(theta);
  return wsaa::ConvergenceClass::superlinear(theta, eta);
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Kernel-weighted SAA: budgeted solvers, confidence intervals and Monte Carlo experiments" };
  app.require_subcommand(1);

  ProblemOptions po;
  SolverOptions so;

  auto* solve = app.add_subcommand("solve", "solve one weighted problem and print the decision");
  add_problem_options(solve, po);
  add_solver_options(solve, so);

  double alpha = 0.05;
  auto* infer = app.add_subcommand("infer", "confidence interval for the optimal conditional cost");
  add_problem_options(infer, po);
  add_solver_options(infer, so);
  infer->add_option("--alpha", alpha, "1 - confidence level");

  std::string regime = "linear", rule = "optimal";
  double beta = 0.5, theta = 0.5, eta = 2.0, c0 = 1.0;
  std::optional<double> kappa_tilde, kappa_override;
  std::uint64_t gamma = 10000;
  double delta = 0.2;
  int d_x = 2;
  auto* alloc = app.add_subcommand("allocate", "split a budget between sample size and iterations");
  alloc->add_option("--regime", regime, "sublinear | linear | superlinear")
    ->check(CLI::IsMember({ "sublinear", "linear", "superlinear" }));
  alloc->add_option("--rule", rule, "optimal | over_optimizing");
  alloc->add_option("--beta", beta, "sublinear exponent");
  alloc->add_option("--theta", theta, "contraction factor");
  alloc->add_option("--eta", eta, "superlinear order");
  alloc->add_option("--gamma", gamma, "budget")->required();
  alloc->add_option("--delta", delta, "bandwidth exponent");
  alloc->add_option("--dx", d_x, "covariate dimension");
  alloc->add_option("--c0", c0, "polynomial rule constant");
  alloc->add_option("--kappa-tilde", kappa_tilde, "over-optimizing parameter");
  alloc->add_option("--kappa-override", kappa_override, "replace kappa* in the optimal rule");

  std::vector<double> h0_grid;
  int folds = 5;
  std::uint64_t seed = 1;
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation of the bandwidth constant");
  add_problem_options(cv, po);
  cv->add_option("--h0-grid", h0_grid, "candidates (default: scaled by covariate sd)")->delimiter(',');
  cv->add_option("--k", folds, "number of folds");
  cv->add_option("--seed", seed, "fold assignment seed");

  std::string dgp = "newsvendor", out_path;
  std::uint64_t sample_n = 1000;
  auto* sample = app.add_subcommand("sample", "draw a dataset from a built-in process");
  sample->add_option("--dgp", dgp, "newsvendor | quartic | weather")
    ->check(CLI::IsMember({ "newsvendor", "quartic", "weather" }));
  sample->add_option("--n", sample_n, "sample size")->required();
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("--out", out_path, "output CSV (default: stdout)");

  std::string config_path, out_dir = "out";
  std::optional<std::size_t> workers;
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment from a config file");
  exp->add_option("--config", config_path, "JSON config (comments allowed)")->required();
  exp->add_option("--out", out_dir, "output directory for records.csv and summary.json");
  exp->add_option("--workers", workers, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) {
      const auto lp = load_problem(po);
      const Solved s = solve_with(lp.problem, so);
      json j{ { "z", to_json(s.z) }, { "objective", s.value }, { "iterations", s.iterations } };
      std::cout << j.dump(2) << '\n';
    } else if (*infer) {
      const auto lp = load_problem(po);
      const Solved s = solve_with(lp.problem, so);
      const auto n = static_cast<std::size_t>(lp.data.size());
      const auto ci = wsaa::interval_at(lp.problem, s.z, n, lp.h, lp.d_x, alpha);
      json j{ { "z", to_json(s.z) },         { "estimate", ci.estimate }, { "variance_hat", ci.variance_hat },
              { "half_width", ci.half_width }, { "lower", ci.lower },       { "upper", ci.upper },
              { "level", ci.level },           { "n", ci.n },               { "h", ci.h },
              { "iterations", s.iterations } };
      std::cout << j.dump(2) << '\n';
    } else if (*alloc) {
      wsaa::AllocationExtras ex{ c0, kappa_tilde, kappa_override };
      const auto plan =
        wsaa::allocate(make_regime(regime, beta, theta, eta), wsaa::parse_allocation_rule(rule), gamma, delta, d_x, ex);
      json j{ { "regime", plan.regime.name() },   { "rule", std::string(wsaa::to_string(plan.rule)) },
              { "gamma", plan.gamma },            { "kappa_star", plan.kappa_star },
              { "kappa_used", plan.kappa_used },  { "n", plan.n },
              { "m", plan.m },                    { "rate_exponent", finite_or_null(plan.rate_exponent) },
              { "warnings", plan.warnings } };
      std::cout << j.dump(2) << '\n';
    } else if (*cv) {
      const wsaa::Dataset data = wsaa::load_dataset_csv(po.data);
      wsaa::CvGrid grid;
      grid.h0_candidates = h0_grid.empty() ? wsaa::default_h0_grid(data) : h0_grid;
      grid.k = folds;
      wsaa::CvSetup setup{ { wsaa::parse_kernel_family(po.kernel) },
                           po.delta,
                           make_cost(po),
                           wsaa::FeasibleBox(to_vec(po.lower), to_vec(po.upper)),
                           std::nullopt };
      wsaa::RngStream rng(seed, 0);
      const auto res = wsaa::kfold_cv(data, to_vec(po.x0), grid, setup, rng);
      json cands = json::array();
      for (const auto& c : res.candidates)
        cands.push_back({ { "h0", c.h0 },
                          { "score", finite_or_null(c.score) },
                          { "disqualified", c.disqualified },
                          { "reason", c.reason } });
      json j{ { "h0", res.best.h0 }, { "score", res.best.score }, { "candidates", cands } };
      std::cout << j.dump(2) << '\n';
    } else if (*sample) {
      wsaa::Simulator::Params params = wsaa::NewsvendorDgp{};
      if (dgp == "quartic")
        params = wsaa::QuarticDgp{};
      else if (dgp == "weather")
        params = wsaa::WeatherDgp{};
      wsaa::RngStream rng(seed, 0);
      const auto data = wsaa::sample_dataset(wsaa::Simulator(params), sample_n, rng);
      if (out_path.empty())
        wsaa::write_dataset_csv(data, std::cout);
      else
        wsaa::save_dataset_csv(data, out_path);
    } else if (*exp) {
      wsaa::ExperimentConfig cfg = wsaa::load_experiment_config(config_path);
      if (workers)
        cfg.workers = *workers;
      const auto result = wsaa::run_experiment(cfg);
      wsaa::write_experiment_outputs(result, out_dir);
      const auto& s = result.summary;
      std::cout << s.name << ": f* = " << s.oracle.f << " (se " << s.oracle.std_error << ")\n";
      for (const auto& g : s.grid)
        std::cout << "  " << (s.budgeted ? "gamma=" + std::to_string(g.point.gamma) + " " : "") << "n=" << g.point.n
                  << " m=" << g.point.m << " coverage=" << g.coverage << " rel_width=" << g.rel_width_mean
                  << " rel_rmse=" << g.rel_rmse << " failures=" << g.failures << '\n';
      std::cout << "  slope=" << s.slope << " (theory " << s.theoretical_rate << ")\n";
      for (const auto& w : s.warnings)
        std::cerr << "warning: " << w << '\n';
      if (s.degraded)
        return kExitDegraded;
    }
  } catch (const wsaa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wsaa::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wsaa::InvalidRegime& e) {
    std::cerr << "invalid regime: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
