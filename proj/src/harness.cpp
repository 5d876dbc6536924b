#include "wsaa/harness.hpp"

#include "wsaa/error.hpp"
#include "wsaa/infer.hpp"
#include "wsaa/normal.hpp"
#include "wsaa/tune.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace wsaa {

namespace {

constexpr std::uint64_t kOracleStream = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kPilotData = 0xFFFFFFFEull;
constexpr std::uint64_t kPilotFolds = 0xFFFFFFFDull;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::uint64_t>&
grid_values(const ExperimentConfig& cfg)
{
  if (const auto* u = std::get_if<UnconstrainedMode>(&cfg.mode))
    return u->n_list;
  return std::get<BudgetedMode>(cfg.mode).gamma_list;
}

} // namespace

std::uint64_t
replication_stream(std::size_t grid_index, std::uint64_t rep_id)
{
  if (rep_id >= kPilotFolds)
    throw InvalidArgument("replication id out of range");
  return (static_cast<std::uint64_t>(grid_index) << 32) | rep_id;
}

Eigen::VectorXd
resolve_query_point(const ExperimentConfig& cfg)
{
  if (cfg.x0.value)
    return *cfg.x0.value;
  return covariate_quantile(cfg.dgp, *cfg.x0.quantile);
}

OracleResult
compute_oracle(const ExperimentConfig& cfg, const Eigen::VectorXd& x0)
{
  RngStream rng(cfg.base_seed, kOracleStream);
  return oracle_optimal_value(cfg.dgp, x0, cfg.cost, cfg.box, cfg.oracle_n, rng);
}

GridPoint
prepare_grid_point(const ExperimentConfig& cfg, const Eigen::VectorXd& x0, std::size_t g)
{
  const auto& values = grid_values(cfg);
  if (g >= values.size())
    throw InvalidArgument("grid index out of range");

  GridPoint pt;
  pt.index = g;
  if (const auto* b = std::get_if<BudgetedMode>(&cfg.mode)) {
    pt.gamma = values[g];
    AllocationExtras ex = b->extras;
    const double ks = kappa_star(b->regime, cfg.delta, cfg.dgp.d_x());
    if (b->c0_is_kappa_star)
      ex.c0 = ks;
    if (b->kappa_scale && !ex.kappa_override)
      ex.kappa_override = *b->kappa_scale * ks;
    pt.plan = allocate(b->regime, b->rule, pt.gamma, cfg.delta, cfg.dgp.d_x(), ex);
    pt.n = pt.plan->n;
    pt.m = pt.plan->m;
    pt.solver = SolverConfig{ b->algorithm, static_cast<std::size_t>(pt.m), b->z0.value_or(cfg.box.midpoint()) };
  } else {
    pt.n = values[g];
  }

  pt.h0 = cfg.h0.value_or(0.0);
  if (cfg.cv) {
    RngStream data_rng(cfg.base_seed, (static_cast<std::uint64_t>(g) << 32) | kPilotData);
    const Dataset pilot = sample_dataset(cfg.dgp, pt.n, data_rng);
    CvGrid grid;
    grid.h0_candidates = cfg.cv->h0_grid;
    if (grid.h0_candidates.empty())
      grid.h0_candidates = cfg.h0 ? std::vector<double>{ *cfg.h0 } : default_h0_grid(pilot);
    grid.mu0_candidates = cfg.cv->mu0_grid;
    grid.z0_candidates = cfg.cv->z0_grid;
    grid.k = cfg.cv->k;
    CvSetup setup{ cfg.kernel, cfg.delta, cfg.cost, cfg.box, pt.solver };
    RngStream fold_rng(cfg.base_seed, (static_cast<std::uint64_t>(g) << 32) | kPilotFolds);
    const CvResult cv = kfold_cv(pilot, x0, grid, setup, fold_rng);
    pt.h0 = cv.best.h0;
    pt.cv_score = cv.best.score;
    if (pt.solver) {
      if (cv.best.mu0)
        std::get<SubgradientMethod>(pt.solver->algorithm).mu0 = *cv.best.mu0;
      if (cv.best.z0)
        pt.solver->z0 = *cv.best.z0;
    }
  }
  pt.h = pt.h0 * std::pow(static_cast<double>(pt.n), -cfg.delta);
  return pt;
}

ReplicationRecord
run_replication(const ExperimentConfig& cfg,
                const Eigen::VectorXd& x0,
                const GridPoint& pt,
                const OracleResult& oracle,
                std::uint64_t rep_id)
{
  const auto start = std::chrono::steady_clock::now();
  ReplicationRecord r;
  r.grid_index = pt.index;
  r.rep_id = rep_id;
  r.gamma = pt.gamma;
  r.n = pt.n;
  r.m = pt.m;
  r.h = pt.h;
  r.f_star = oracle.f;
  try {
    RngStream rng(cfg.base_seed, replication_stream(pt.index, rep_id));
    Dataset data = sample_dataset(cfg.dgp, pt.n, rng);
    WeightVector w = nw_weights(data.X, x0, cfg.kernel, pt.h);
    const WsaaProblem prob(std::move(data.Y), std::move(w), cfg.cost, cfg.box);
    const ExactSolution exact = solve_exact(prob);
    Eigen::VectorXd z = exact.z;
    r.solver_iterations = exact.iterations;
    if (pt.solver) {
      const SolverTrace trace = run_solver(prob, *pt.solver);
      z = trace.delivered();
      r.solver_iterations = trace.iterations_used;
    }
    const IntervalReport ci =
      interval_at(prob, z, static_cast<std::size_t>(pt.n), pt.h, cfg.dgp.d_x(), cfg.alpha);
    r.estimate = ci.estimate;
    r.lower = ci.lower;
    r.upper = ci.upper;
    r.half_width = ci.half_width;
    r.covered = ci.covers(oracle.f);
    const ErrorDecomposition dec = error_decomposition(ci.estimate, exact.value, oracle.f);
    r.optimization_error = pt.solver ? dec.optimization_error : 0.0;
    r.statistical_error = dec.statistical_error;
  } catch (const std::exception& e) {
    r.failed = true;
    r.failure = e.what();
    r.estimate = r.lower = r.upper = r.half_width = kNaN;
    r.optimization_error = r.statistical_error = kNaN;
  }
  if (cfg.timing)
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

GridSummary
summarize_grid_point(const GridPoint& pt, const std::vector<ReplicationRecord>& records, double alpha)
{
  GridSummary s;
  s.point = pt;
  s.replications = records.size();
  const double zq = normal_quantile(1.0 - alpha / 2.0);
  std::vector<double> widths, pivots;
  double se = 0.0, est = 0.0, opt = 0.0, stat = 0.0;
  std::size_t covered = 0, ok = 0;
  double f_star = 0.0;
  for (const auto& r : records) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++ok;
    f_star = r.f_star;
    covered += r.covered ? 1 : 0;
    widths.push_back((r.upper - r.lower) / r.f_star);
    se += (r.estimate - r.f_star) * (r.estimate - r.f_star);
    est += r.estimate;
    opt += r.optimization_error;
    stat += r.statistical_error;
    if (r.half_width > 0.0)
      pivots.push_back((r.estimate - r.f_star) * zq / r.half_width);
  }
  s.degraded = static_cast<double>(s.failures) > 0.2 * static_cast<double>(s.replications);
  if (ok == 0) {
    s.coverage = s.rel_width_mean = s.rel_width_sd = s.rel_rmse = kNaN;
    s.mean_estimate = s.mean_optimization_error = s.mean_statistical_error = kNaN;
    s.ks_statistic = s.ks_p_value = kNaN;
    return s;
  }
  const double k = static_cast<double>(ok);
  s.coverage = static_cast<double>(covered) / k;
  double wm = 0.0;
  for (double w : widths)
    wm += w;
  wm /= k;
  double wv = 0.0;
  for (double w : widths)
    wv += (w - wm) * (w - wm);
  s.rel_width_mean = wm;
  s.rel_width_sd = ok > 1 ? std::sqrt(wv / (k - 1.0)) : 0.0;
  s.rel_rmse = std::sqrt(se / k) / std::abs(f_star);
  s.mean_estimate = est / k;
  s.mean_optimization_error = opt / k;
  s.mean_statistical_error = stat / k;
  if (!pivots.empty()) {
    const KsResult ks = ks_test_normal(pivots);
    s.ks_statistic = ks.statistic;
    s.ks_p_value = ks.p_value;
  } else {
    s.ks_statistic = s.ks_p_value = kNaN;
  }
  return s;
}

SlopeFit
fit_loglog_slope(const std::vector<double>& sizes, const std::vector<double>& rmses)
{
  if (sizes.size() != rmses.size() || sizes.size() < 2)
    throw InvalidArgument("slope fit needs at least two (size, rmse) pairs");
  const std::size_t n = sizes.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sizes[i] > 0.0) || !(rmses[i] > 0.0))
      throw InvalidArgument("slope fit needs positive sizes and RMSEs");
    x[i] = std::log(sizes[i]);
    y[i] = std::log(rmses[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw InvalidArgument("slope fit needs at least two distinct sizes");
  SlopeFit fit{ sxy / sxx, kNaN, 0.0 };
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.stderr_ = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

ExperimentResult
run_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  ExperimentResult out;
  ExperimentSummary& sum = out.summary;
  sum.name = cfg.name;
  sum.budgeted = cfg.budgeted();
  sum.config_source = cfg.source;
  sum.x0 = resolve_query_point(cfg);
  sum.oracle = compute_oracle(cfg, sum.x0);

  if (BandwidthSchedule(cfg.h0.value_or(1.0), cfg.delta, cfg.dgp.d_x()).outside_debiasing_range())
    sum.warnings.push_back("delta <= 1/(d_x + 4): kernel bias is not negligible and intervals may undercover");
  if (cfg.kernel.family != KernelFamily::gaussian)
    sum.warnings.push_back("compact kernel: replications with an empty neighborhood are counted as failures");

  std::size_t workers = cfg.workers;
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.replications);

  const auto& values = grid_values(cfg);
  std::vector<double> sizes, rmses;
  for (std::size_t g = 0; g < values.size(); ++g) {
    const GridPoint pt = prepare_grid_point(cfg, sum.x0, g);
    if (pt.plan)
      for (const auto& w : pt.plan->warnings)
        sum.warnings.push_back("gamma " + std::to_string(pt.gamma) + ": " + w);

    std::vector<ReplicationRecord> recs(cfg.replications);
    std::atomic<std::size_t> next{ 0 };
    auto work = [&]() {
      for (std::size_t i; (i = next.fetch_add(1)) < recs.size();)
        recs[i] = run_replication(cfg, sum.x0, pt, sum.oracle, i);
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back(work);
      for (auto& th : pool)
        th.join();
    }

    GridSummary gs = summarize_grid_point(pt, recs, cfg.alpha);
    if (gs.degraded) {
      sum.degraded = true;
      sum.warnings.push_back("grid point " + std::to_string(g) + ": " + std::to_string(gs.failures) + " of " +
                             std::to_string(gs.replications) + " replications failed");
    }
    if (gs.rel_rmse > 0.0) {
      sizes.push_back(static_cast<double>(values[g]));
      rmses.push_back(gs.rel_rmse);
    }
    sum.grid.push_back(std::move(gs));
    out.records.insert(out.records.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }

  sum.slope = sum.slope_stderr = kNaN;
  if (sizes.size() >= 2) {
    const SlopeFit fit = fit_loglog_slope(sizes, rmses);
    sum.slope = fit.slope;
    sum.slope_stderr = fit.stderr_;
  }
  if (cfg.budgeted())
    sum.theoretical_rate = sum.grid.front().point.plan->rate_exponent;
  else
    sum.theoretical_rate = -(1.0 - cfg.delta * cfg.dgp.d_x()) / 2.0;
  return out;
}

} // namespace wsaa
