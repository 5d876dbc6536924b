#pragma once

#include "wsaa/costs.hpp"

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace wsaa {

struct IntervalReport
{
  double estimate = 0.0;
  double variance_hat = 0.0;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  //! Nominal coverage 1 - alpha.
  double level = 0.95;
  std::size_t n = 0;
  double h = 0.0;
  int d_x = 0;

  bool covers(double value) const { return lower <= value && value <= upper; }
};

//! sum_i w_i (F(z; y_i) - f_hat(z))^2.
double sample_cond_variance(const WsaaProblem& p, const Eigen::VectorXd& z);

//! n h^d_x * sample_cond_variance * sum_i w_i^2. Negative rounding residue is
//! clamped to zero.
double variance_estimate(const WsaaProblem& p, const Eigen::VectorXd& z, std::size_t n, double h, int d_x);

//! sample_cond_variance * r2 / kde_value. Throws DegenerateDensity when
//! kde_value is not positive.
double direct_variance_estimate(const WsaaProblem& p, const Eigen::VectorXd& z, double kde_value, double r2);

//! estimate -/+ Phi^-1(1 - alpha/2) sqrt(variance_hat / (n h^d_x)).
IntervalReport confidence_interval(double estimate, double variance_hat, std::size_t n, double h, int d_x, double alpha);

//! Plugs z into the variance estimate and builds the interval for f_hat(z).
IntervalReport interval_at(const WsaaProblem& p, const Eigen::VectorXd& z, std::size_t n, double h, int d_x, double alpha);

struct ErrorDecomposition
{
  double optimization_error;
  double statistical_error;
};

ErrorDecomposition error_decomposition(double f_budgeted, double f_exact, double f_star);

struct KsResult
{
  double statistic;
  double p_value;
};

//! One-sample Kolmogorov-Smirnov test against the standard normal; p-value
//! from the asymptotic Kolmogorov series with Stephens' finite-n correction.
KsResult ks_test_normal(std::vector<double> sample);

//! P(sup |B(t)| > lambda) for a Brownian bridge.
double kolmogorov_survival(double lambda);

} // namespace wsaa
