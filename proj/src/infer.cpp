#include "wsaa/infer.hpp"

#include "wsaa/error.hpp"
#include "wsaa/normal.hpp"

#include <algorithm>
#include <cmath>

namespace wsaa {

double
sample_cond_variance(const WsaaProblem& p, const Eigen::VectorXd& z)
{
  const Eigen::VectorXd c = sample_costs(p.model(), p.outcomes(), z);
  const Eigen::VectorXd& w = p.weights().values();
  const double mean = w.dot(c);
  const double v = w.dot((c.array() - mean).square().matrix());
  return std::max(v, 0.0);
}

double
variance_estimate(const WsaaProblem& p, const Eigen::VectorXd& z, std::size_t n, double h, int d_x)
{
  if (n == 0 || !(h > 0.0) || d_x < 1)
    throw InvalidArgument("variance estimate needs n >= 1, h > 0 and d_x >= 1");
  const double nh = static_cast<double>(n) * std::pow(h, d_x);
  return std::max(nh * sample_cond_variance(p, z) * sum_sq_weights(p.weights()), 0.0);
}

double
direct_variance_estimate(const WsaaProblem& p, const Eigen::VectorXd& z, double kde_value, double r2)
{
  if (!(kde_value > 0.0))
    throw DegenerateDensity("covariate density estimate is zero at the query point");
  if (!(r2 > 0.0))
    throw InvalidArgument("kernel roughness must be positive");
  return sample_cond_variance(p, z) * r2 / kde_value;
}

IntervalReport
confidence_interval(double estimate, double variance_hat, std::size_t n, double h, int d_x, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(variance_hat >= 0.0))
    throw InvalidArgument("variance estimate must be nonnegative");
  if (n == 0 || !(h > 0.0) || d_x < 1)
    throw InvalidArgument("interval needs n >= 1, h > 0 and d_x >= 1");
  IntervalReport r;
  r.estimate = estimate;
  r.variance_hat = variance_hat;
  r.half_width = normal_quantile(1.0 - alpha / 2.0) *
                 std::sqrt(variance_hat / (static_cast<double>(n) * std::pow(h, d_x)));
  r.lower = estimate - r.half_width;
  r.upper = estimate + r.half_width;
  r.level = 1.0 - alpha;
  r.n = n;
  r.h = h;
  r.d_x = d_x;
  return r;
}

IntervalReport
interval_at(const WsaaProblem& p, const Eigen::VectorXd& z, std::size_t n, double h, int d_x, double alpha)
{
  return confidence_interval(wsaa_objective(p, z), variance_estimate(p, z, n, h, d_x), n, h, d_x, alpha);
}

ErrorDecomposition
error_decomposition(double f_budgeted, double f_exact, double f_star)
{
  return { f_budgeted - f_exact, f_exact - f_star };
}

double
kolmogorov_survival(double lambda)
{
  if (!(lambda > 0.0))
    return 1.0;
  if (lambda < 0.3) {
    // Alternating series converges slowly here; use the Jacobi theta form.
    const double c = M_PI * M_PI / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k < 50; k += 2)
      s += std::exp(-k * k * c);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300)
      break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult
ks_test_normal(std::vector<double> sample)
{
  if (sample.empty())
    throw InvalidArgument("KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = normal_cdf(sample[i]);
    d = std::max({ d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n });
  }
  const double rn = std::sqrt(n);
  return { d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d) };
}

} // namespace wsaa
