#include "wsaa/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace wsaa {

std::string
algorithm_name(const SolverAlgorithm& algorithm)
{
  if (std::holds_alternative<SubgradientMethod>(algorithm))
    return "subgradient";
  if (std::holds_alternative<GradientArmijo>(algorithm))
    return "gradient_armijo";
  return "newton_armijo";
}

namespace {

void
check_armijo(double a, double b)
{
  if (!(a > 0.0 && a < 0.5))
    throw InvalidArgument("Armijo parameter a must lie in (0, 0.5)");
  if (!(b > 0.0 && b < 1.0))
    throw InvalidArgument("Armijo parameter b must lie in (0, 1)");
}

void
check_start(const WsaaProblem& p, const SolverConfig& cfg)
{
  cfg.validate();
  if (cfg.z0.size() != p.model().d_z())
    throw InvalidArgument("initial point has the wrong dimension");
  if (!cfg.z0.allFinite() || !p.box().contains(cfg.z0, 1e-10))
    throw InvalidArgument("initial point must lie in the feasible box");
}

SolverTrace
start_trace(const WsaaProblem& p, const Eigen::VectorXd& z0, std::size_t m)
{
  SolverTrace trace;
  trace.iterates.reserve(m + 1);
  trace.objective_values.reserve(m + 1);
  trace.best_objective_values.reserve(m + 1);
  trace.backtrack_counts.reserve(m);
  const Eigen::VectorXd z = p.box().project(z0);
  const double f = wsaa_objective(p, z);
  trace.iterates.push_back(z);
  trace.objective_values.push_back(f);
  trace.best_objective_values.push_back(f);
  return trace;
}

void
push_iterate(SolverTrace& trace, Eigen::VectorXd z, double f, int backtracks)
{
  const double best = std::min(trace.best_objective_values.back(), f);
  trace.iterates.push_back(std::move(z));
  trace.objective_values.push_back(f);
  trace.best_objective_values.push_back(best);
  trace.backtrack_counts.push_back(backtracks);
  ++trace.iterations_used;
}

enum class Direction
{
  gradient,
  newton
};

struct DescentOptions
{
  double a;
  double b;
  Direction direction;
  // Stop once the projected gradient norm falls below this (<= 0: never).
  double gradient_tol = 0.0;
  // Stop at the first iteration that cannot move.
  bool stop_when_stationary = false;
};

struct DescentOutcome
{
  SolverTrace trace;
  bool stationary = false;
  double final_pg_norm = 0.0;
};

// Directions this short relative to |z| are below the resolution of the
// computed gradient; a failed search along them is a stationary point, not
// a stall.
bool
negligible(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double rel)
{
  return d.norm() <= rel * (1.0 + z.norm());
}

DescentOutcome
armijo_descent(const WsaaProblem& p, const Eigen::VectorXd& z0, std::size_t m, const DescentOptions& opt)
{
  const FeasibleBox& box = p.box();
  DescentOutcome out{ start_trace(p, z0, m) };
  SolverTrace& trace = out.trace;

  for (std::size_t t = 0; t < m; ++t) {
    const Eigen::VectorXd z = trace.iterates.back();
    const double fz = trace.objective_values.back();
    const Eigen::VectorXd g = wsaa_grad(p, z);
    const Eigen::VectorXd pg = box.project(z - g) - z;
    out.final_pg_norm = pg.norm();
    if (opt.gradient_tol > 0.0 && out.final_pg_norm < opt.gradient_tol)
      break;

    Eigen::VectorXd d;
    if (pg.squaredNorm() == 0.0) {
      d = Eigen::VectorXd::Zero(z.size());
    } else if (opt.direction == Direction::gradient) {
      d = pg;
    } else {
      Eigen::MatrixXd H = wsaa_hessian(p, z);
      H = 0.5 * (H + H.transpose());
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
      if (!(min_eig >= 1e-10))
        throw CurvatureError(min_eig);
      const Eigen::VectorXd v = z - H.llt().solve(g);
      d = h_metric_projection(H, v, box) - z;
    }

    const double gd = g.dot(d);
    bool moved = false;
    if (!(gd >= 0.0) && !negligible(d, z, 1e-15)) {
      double step = 1.0;
      for (int ell = 0; ell <= kMaxBacktracks; ++ell, step *= opt.b) {
        Eigen::VectorXd zt = box.project(z + step * d);
        if (wsaa_objective_gap(p, zt, z) <= opt.a * step * gd) {
          const double ft = wsaa_objective(p, zt);
          push_iterate(trace, std::move(zt), ft, ell);
          moved = true;
          break;
        }
      }
      if (!moved && !negligible(d, z, 1e-9))
        throw StalledLineSearch("line search found no sufficient decrease within " +
                                  std::to_string(kMaxBacktracks) + " backtracks",
                                trace);
    }
    if (!moved) {
      out.stationary = true;
      if (opt.stop_when_stationary)
        break;
      push_iterate(trace, z, fz, 0);
    }
  }
  if (trace.iterations_used > 0 || m == 0) {
    const Eigen::VectorXd& z = trace.iterates.back();
    out.final_pg_norm = (box.project(z - wsaa_grad(p, z)) - z).norm();
  }
  trace.delivered_index = trace.iterates.size() - 1;
  return out;
}

} // namespace

void
SolverConfig::validate() const
{
  if (const auto* s = std::get_if<SubgradientMethod>(&algorithm)) {
    if (!(s->mu0 > 0.0) || !std::isfinite(s->mu0))
      throw InvalidArgument("subgradient step parameter mu0 must be positive");
  } else if (const auto* g = std::get_if<GradientArmijo>(&algorithm)) {
    check_armijo(g->a, g->b);
  } else {
    const auto& n = std::get<NewtonArmijo>(algorithm);
    check_armijo(n.a, n.b);
  }
}

SolverTrace
projected_subgradient(const WsaaProblem& p, const SolverConfig& cfg)
{
  check_start(p, cfg);
  const double mu0 = std::get<SubgradientMethod>(cfg.algorithm).mu0;
  const std::size_t m = cfg.max_iters;
  const double mu = mu0 / std::sqrt(static_cast<double>(m) + 1.0);
  const bool smooth = p.model().differentiable();

  SolverTrace trace = start_trace(p, cfg.z0, m);
  trace.delivers_best = true;
  for (std::size_t t = 0; t < m; ++t) {
    const Eigen::VectorXd& z = trace.iterates.back();
    const Eigen::VectorXd g = smooth ? wsaa_grad(p, z) : wsaa_subgrad(p, z);
    Eigen::VectorXd next = p.box().project(z - mu * g);
    const double f = wsaa_objective(p, next);
    if (f < trace.best_objective_values.back())
      trace.delivered_index = t + 1;
    push_iterate(trace, std::move(next), f, 0);
  }
  return trace;
}

SolverTrace
projected_gradient_armijo(const WsaaProblem& p, const SolverConfig& cfg)
{
  check_start(p, cfg);
  const auto& alg = std::get<GradientArmijo>(cfg.algorithm);
  if (!p.model().differentiable())
    throw WrongModel("projected gradient needs a differentiable cost");
  return armijo_descent(p, cfg.z0, cfg.max_iters, { alg.a, alg.b, Direction::gradient }).trace;
}

SolverTrace
projected_newton(const WsaaProblem& p, const SolverConfig& cfg)
{
  check_start(p, cfg);
  const auto& alg = std::get<NewtonArmijo>(cfg.algorithm);
  if (!p.model().differentiable())
    throw WrongModel("projected Newton needs a twice-differentiable cost");
  if (p.model().d_z() > 4)
    throw UnsupportedDimension("Hessian-metric projection supports d_z <= 4");
  return armijo_descent(p, cfg.z0, cfg.max_iters, { alg.a, alg.b, Direction::newton }).trace;
}

SolverTrace
run_solver(const WsaaProblem& p, const SolverConfig& cfg)
{
  if (std::holds_alternative<SubgradientMethod>(cfg.algorithm))
    return projected_subgradient(p, cfg);
  if (std::holds_alternative<GradientArmijo>(cfg.algorithm))
    return projected_gradient_armijo(p, cfg);
  return projected_newton(p, cfg);
}

Eigen::VectorXd
h_metric_projection(const Eigen::MatrixXd& H, const Eigen::VectorXd& v, const FeasibleBox& box)
{
  const int d = static_cast<int>(v.size());
  if (d > 4)
    throw UnsupportedDimension("Hessian-metric projection supports d_z <= 4");
  if (H.rows() != d || H.cols() != d || box.dim() != d)
    throw InvalidArgument("projection operands have inconsistent dimensions");
  if (box.contains(v, 0.0))
    return v;
  if (d == 1)
    return box.project(v);

  const Eigen::VectorXd& lo = box.lower();
  const Eigen::VectorXd& hi = box.upper();
  int patterns = 1;
  for (int j = 0; j < d; ++j)
    patterns *= 3;

  Eigen::VectorXd best;
  double best_q = 0.0;
  bool best_feasible = false;
  for (int code = 0; code < patterns; ++code) {
    // digit 0: free, 1: at lower bound, 2: at upper bound
    Eigen::VectorXd z = v;
    std::vector<int> free_idx, fixed_idx;
    for (int j = 0, c = code; j < d; ++j, c /= 3) {
      const int s = c % 3;
      if (s == 0) {
        free_idx.push_back(j);
      } else {
        z[j] = s == 1 ? lo[j] : hi[j];
        fixed_idx.push_back(j);
      }
    }
    if (!free_idx.empty() && !fixed_idx.empty()) {
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      const auto nb = static_cast<Eigen::Index>(fixed_idx.size());
      Eigen::MatrixXd Hff(nf, nf), Hfb(nf, nb);
      Eigen::VectorXd shift(nb);
      for (Eigen::Index r = 0; r < nf; ++r) {
        for (Eigen::Index c = 0; c < nf; ++c)
          Hff(r, c) = H(free_idx[r], free_idx[c]);
        for (Eigen::Index c = 0; c < nb; ++c)
          Hfb(r, c) = H(free_idx[r], fixed_idx[c]);
      }
      for (Eigen::Index c = 0; c < nb; ++c)
        shift[c] = z[fixed_idx[c]] - v[fixed_idx[c]];
      const Eigen::VectorXd delta = Hff.ldlt().solve(Hfb * shift);
      for (Eigen::Index r = 0; r < nf; ++r)
        z[free_idx[r]] = v[free_idx[r]] - delta[r];
    }
    const double scale = 1e-12 * (1.0 + std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
    const bool feasible = box.contains(z, scale);
    z = box.project(z);
    const Eigen::VectorXd r = z - v;
    const double q = r.dot(H * r);
    if ((feasible && (!best_feasible || q < best_q)) || (!best_feasible && !feasible && (best.size() == 0 || q < best_q))) {
      best = z;
      best_q = q;
      best_feasible = feasible;
    }
  }
  return best;
}

double
weighted_quantile(const Eigen::Ref<const Eigen::VectorXd>& values, const WeightVector& w, double level)
{
  if (values.size() == 0 || static_cast<std::size_t>(values.size()) != w.size())
    throw InvalidArgument("weighted quantile needs one weight per value");
  if (!(level > 0.0 && level < 1.0))
    throw InvalidArgument("quantile level must lie in (0, 1)");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return values[i] < values[j]; });
  // Weights only sum to one within 1e-12, so a cumulative sum that should
  // equal the level may land just below it.
  const double target = level - 1e-12;
  double cum = 0.0;
  for (Eigen::Index i : order) {
    cum += w.values()[i];
    if (cum >= target)
      return values[i];
  }
  return values[order.back()];
}

double
weighted_expectile(const Eigen::Ref<const Eigen::VectorXd>& values, const WeightVector& w, double cu, double co)
{
  if (values.size() == 0 || static_cast<std::size_t>(values.size()) != w.size())
    throw InvalidArgument("weighted expectile needs one weight per value");
  if (!(cu > 0.0) || !(co > 0.0))
    throw InvalidArgument("expectile costs must be positive");
  const Eigen::VectorXd& wv = w.values();
  auto foc = [&](double z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double r = values[i] - z;
      s += wv[i] * (r > 0.0 ? -2.0 * cu * r : -2.0 * co * r);
    }
    return s;
  };
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid)) || mid <= lo || mid >= hi)
      break;
    if (foc(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

ExactSolution
quartic_newton(const WsaaProblem& p, const Eigen::VectorXd& start)
{
  constexpr std::size_t max_iters = 500;
  DescentOptions opt{ 0.1, 0.9, Direction::newton };
  opt.gradient_tol = 1e-10;
  opt.stop_when_stationary = true;
  DescentOutcome out = armijo_descent(p, start, max_iters, opt);
  if (!(out.final_pg_norm < 1e-10) && !out.stationary)
    throw SolverFailure("Newton did not reach gradient norm 1e-10 in " + std::to_string(max_iters) + " iterations");
  return { out.trace.iterates.back(), out.trace.objective_values.back(), out.trace.iterations_used };
}

} // namespace

ExactSolution
solve_exact(const WsaaProblem& p)
{
  const CostModel& model = p.model();
  const FeasibleBox& box = p.box();
  const Eigen::MatrixXd& Y = p.outcomes();

  if (const auto* nv = model.as<NewsvendorCost>()) {
    Eigen::VectorXd z(1);
    z[0] = weighted_quantile(Y.col(0), p.weights(), nv->cu / (nv->cu + nv->co));
    z = box.project(z);
    return { z, wsaa_objective(p, z) };
  }
  if (const auto* ex = model.as<ExpectileCost>()) {
    Eigen::VectorXd z(1);
    z[0] = weighted_expectile(Y.col(0), p.weights(), ex->cu, ex->co);
    z = box.project(z);
    return { z, wsaa_objective(p, z) };
  }

  const auto& q = *model.as<QuarticCost>();
  if (model.d_z() > 4)
    throw UnsupportedDimension("Hessian-metric projection supports d_z <= 4");
  const Eigen::VectorXd mean = Y.transpose() * p.weights().values();
  const Eigen::VectorXd start = box.project(q.b.cwiseProduct(mean));
  try {
    return quartic_newton(p, start);
  } catch (const CurvatureError&) {
  }
  const Eigen::Index d = start.size();
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd shift(d);
    for (Eigen::Index j = 0; j < d; ++j)
      shift[j] = (k == 2 ? 0.5 : (((j + k) % 2 == 0) ? 1.0 : -1.0));
    const Eigen::VectorXd s = box.project(start + 1e-2 * (1.0 + start.norm()) * shift);
    try {
      return quartic_newton(p, s);
    } catch (const CurvatureError& e) {
      if (k == 2)
        throw;
    }
  }
  throw SolverFailure("unreachable");
}

std::vector<double>
trace_gaps(const WsaaProblem& p, const SolverTrace& trace, const Eigen::VectorXd& z_star)
{
  std::vector<double> gaps;
  gaps.reserve(trace.iterates.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : trace.iterates) {
    const double g = wsaa_objective_gap(p, z, z_star);
    best = std::min(best, g);
    gaps.push_back(trace.delivers_best ? best : g);
  }
  return gaps;
}

} // namespace wsaa
