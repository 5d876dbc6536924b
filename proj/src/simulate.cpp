#include "wsaa/simulate.hpp"

#include "wsaa/error.hpp"
#include "wsaa/normal.hpp"
#include "wsaa/solve.hpp"

#include <cmath>

namespace wsaa {

Simulator::Simulator(Params params)
  : params_(std::move(params))
{
  if (const auto* nv = as<NewsvendorDgp>()) {
    if (!(nv->x1_sd > 0) || !(nv->x2_log_sd > 0) || nv->noise_sd < 0)
      throw InvalidArgument("newsvendor process needs positive covariate scales and noise_sd >= 0");
  } else if (const auto* q = as<QuarticDgp>()) {
    if (!(q->x1_sd > 0) || !(q->x2_sd > 0) || q->noise_sd < 0)
      throw InvalidArgument("quartic process needs positive covariate scales and noise_sd >= 0");
  } else if (const auto* w = as<WeatherDgp>()) {
    if (!(w->temp_sd > 0) || !(w->wind_log_sd > 0) || w->noise_log_sd < 0 || !(w->temp_width > 0) ||
        !(w->wind_scale > 0))
      throw InvalidArgument("weather process needs positive scales");
  } else if (const auto* u = as<UniformDgp>()) {
    if (u->d_x < 1 || !(u->lo <= u->hi))
      throw InvalidArgument("uniform test law needs d_x >= 1 and lo <= hi");
  }
}

std::string_view
Simulator::name() const
{
  if (as<NewsvendorDgp>())
    return "newsvendor";
  if (as<QuarticDgp>())
    return "quartic";
  if (as<WeatherDgp>())
    return "weather";
  return "uniform";
}

int
Simulator::d_x() const
{
  if (const auto* u = as<UniformDgp>())
    return u->d_x;
  return 2;
}

int
Simulator::d_y() const
{
  return as<QuarticDgp>() ? 2 : 1;
}

double
newsvendor_step(double x2)
{
  if (x2 <= 2.0)
    return 2.0;
  if (x2 <= 4.0)
    return 4.0;
  if (x2 <= 6.0)
    return 6.0;
  return 8.0;
}

double
newsvendor_mean(const NewsvendorDgp& dgp, double x1, double x2)
{
  return dgp.base + (x1 - dgp.x1_mean) + x2 * newsvendor_step(x2);
}

Eigen::VectorXd
quartic_mean(const QuarticDgp&, double x1, double x2)
{
  Eigen::VectorXd m(2);
  m << std::log(x1 + 4.0) + 5.0, std::sqrt(std::abs(x2)) + 10.0;
  return m;
}

double
weather_mean(const WeatherDgp& dgp, double temp, double wind)
{
  const double t = (temp - dgp.peak_temp) / dgp.temp_width;
  return dgp.base_demand + dgp.peak_demand * std::exp(-t * t) * std::exp(-wind / dgp.wind_scale);
}

namespace {

// Normal(mean, sd) conditioned on being >= 0, by rejection from the parent.
double
left_truncated_normal(double mean, double sd, RngStream& rng)
{
  if (sd == 0.0)
    return mean;
  for (;;) {
    const double y = mean + sd * rng.normal();
    if (y >= 0.0)
      return y;
  }
}

void
draw_covariates(const Simulator& sim, RngStream& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> x)
{
  if (const auto* nv = sim.as<NewsvendorDgp>()) {
    x[0] = nv->x1_mean + nv->x1_sd * rng.normal();
    x[1] = std::exp(nv->x2_log_mean + nv->x2_log_sd * rng.normal());
  } else if (const auto* q = sim.as<QuarticDgp>()) {
    x[0] = q->x1_mean + q->x1_sd * rng.normal();
    x[1] = q->x2_mean + q->x2_sd * rng.normal();
  } else if (const auto* w = sim.as<WeatherDgp>()) {
    x[0] = w->temp_mean + w->temp_sd * rng.normal();
    x[1] = std::exp(w->wind_log_mean + w->wind_log_sd * rng.normal());
  } else {
    for (Eigen::Index j = 0; j < x.size(); ++j)
      x[j] = rng.uniform();
  }
}

void
draw_outcome(const Simulator& sim,
             const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& x,
             RngStream& rng,
             Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> y)
{
  if (const auto* nv = sim.as<NewsvendorDgp>()) {
    y[0] = left_truncated_normal(newsvendor_mean(*nv, x[0], x[1]), nv->noise_sd, rng);
  } else if (const auto* q = sim.as<QuarticDgp>()) {
    const Eigen::VectorXd m = quartic_mean(*q, x[0], x[1]);
    y[0] = m[0] + q->noise_sd * rng.normal();
    y[1] = m[1] + q->noise_sd * rng.normal();
  } else if (const auto* w = sim.as<WeatherDgp>()) {
    const double s = w->noise_log_sd;
    y[0] = weather_mean(*w, x[0], x[1]) * std::exp(s * rng.normal() - 0.5 * s * s);
  } else {
    const auto& u = *sim.as<UniformDgp>();
    y[0] = u.lo + (u.hi - u.lo) * rng.uniform();
  }
}

} // namespace

Dataset
sample_dataset(const Simulator& sim, std::size_t n, RngStream& rng)
{
  if (n == 0)
    throw InvalidArgument("sample_dataset needs n >= 1");
  const auto rows = static_cast<Eigen::Index>(n);
  Dataset data{ Eigen::MatrixXd(rows, sim.d_x()), Eigen::MatrixXd(rows, sim.d_y()) };
  for (Eigen::Index i = 0; i < rows; ++i) {
    draw_covariates(sim, rng, data.X.row(i));
    draw_outcome(sim, data.X.row(i), rng, data.Y.row(i));
  }
  return data;
}

Eigen::MatrixXd
sample_conditional(const Simulator& sim, const Eigen::VectorXd& x0, std::size_t N, RngStream& rng)
{
  if (N == 0)
    throw InvalidArgument("sample_conditional needs N >= 1");
  if (x0.size() != sim.d_x() || !x0.allFinite())
    throw InvalidArgument("query covariate has the wrong dimension or is not finite");
  const Eigen::RowVectorXd x = x0.transpose();
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(N), sim.d_y());
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    draw_outcome(sim, x, rng, Y.row(i));
  return Y;
}

Eigen::VectorXd
covariate_quantile(const Simulator& sim, double tau)
{
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidArgument("quantile level must lie in (0, 1)");
  const double z = normal_quantile(tau);
  Eigen::VectorXd q(sim.d_x());
  if (const auto* nv = sim.as<NewsvendorDgp>()) {
    q << nv->x1_mean + nv->x1_sd * z, std::exp(nv->x2_log_mean + nv->x2_log_sd * z);
  } else if (const auto* qd = sim.as<QuarticDgp>()) {
    q << qd->x1_mean + qd->x1_sd * z, qd->x2_mean + qd->x2_sd * z;
  } else if (const auto* w = sim.as<WeatherDgp>()) {
    q << w->temp_mean + w->temp_sd * z, std::exp(w->wind_log_mean + w->wind_log_sd * z);
  } else {
    q.setConstant(tau);
  }
  return q;
}

CostModel
make_quartic_cost(int d, RngStream& rng)
{
  if (d < 1)
    throw InvalidArgument("quartic cost needs d >= 1");
  Eigen::VectorXd a(d), b(d);
  for (int j = 0; j < d; ++j) {
    do {
      a[j] = 20.0 + std::sqrt(15.0) * rng.normal();
    } while (!(a[j] > 0.0));
    b[j] = -5.0 + 4.0 * rng.uniform();
  }
  return CostModel::quartic(std::move(a), std::move(b));
}

OracleResult
oracle_from_outcomes(Eigen::MatrixXd outcomes, const CostModel& model, const FeasibleBox& box)
{
  const auto N = static_cast<std::size_t>(outcomes.rows());
  WsaaProblem problem(std::move(outcomes), WeightVector::uniform(N), model, box);
  ExactSolution sol;
  try {
    sol = solve_exact(problem);
  } catch (const Error& e) {
    throw OracleFailure(std::string("oracle solve failed: ") + e.what());
  }
  const Eigen::VectorXd costs = sample_costs(model, problem.outcomes(), sol.z);
  const double mean = costs.mean();
  double var = 0.0;
  if (N > 1)
    var = (costs.array() - mean).square().sum() / static_cast<double>(N - 1);
  return OracleResult{ sol.z, sol.value, std::sqrt(var / static_cast<double>(N)), N };
}

OracleResult
oracle_optimal_value(const Simulator& sim,
                     const Eigen::VectorXd& x0,
                     const CostModel& model,
                     const FeasibleBox& box,
                     std::size_t N,
                     RngStream& rng)
{
  if (sim.d_y() != model.d_y())
    throw InvalidArgument("simulator outcome dimension does not match the cost model");
  return oracle_from_outcomes(sample_conditional(sim, x0, N, rng), model, box);
}

} // namespace wsaa
