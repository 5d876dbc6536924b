#include "wsaa/kernels.hpp"

#include "wsaa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wsaa {

std::string_view
to_string(KernelFamily family)
{
  switch (family) {
    case KernelFamily::uniform:
      return "uniform";
    case KernelFamily::epanechnikov:
      return "epanechnikov";
    case KernelFamily::gaussian:
      return "gaussian";
  }
  return "unknown";
}

KernelFamily
parse_kernel_family(std::string_view name)
{
  if (name == "uniform")
    return KernelFamily::uniform;
  if (name == "epanechnikov")
    return KernelFamily::epanechnikov;
  if (name == "gaussian")
    return KernelFamily::gaussian;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

BandwidthSchedule::BandwidthSchedule(double h0, double delta, int d_x)
  : h0_(h0)
  , delta_(delta)
  , d_x_(d_x)
{
  if (d_x < 1)
    throw InvalidArgument("bandwidth schedule needs d_x >= 1");
  if (!(h0 > 0.0) || !std::isfinite(h0))
    throw InvalidArgument("bandwidth constant h0 must be positive and finite");
  if (!(delta > 0.0) || !(delta < 1.0 / d_x))
    throw InvalidArgument("bandwidth exponent delta must lie in (0, 1/d_x)");
  warn_ = delta <= 1.0 / (d_x + 4.0);
}

WeightVector::WeightVector(Eigen::VectorXd weights)
  : w_(std::move(weights))
{
  if (w_.size() == 0)
    throw InvalidArgument("weight vector is empty");
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (!(w_[i] >= 0.0) || !std::isfinite(w_[i]))
      throw InvalidArgument("weights must be finite and nonnegative");
  }
  if (std::abs(w_.sum() - 1.0) > 1e-12)
    throw InvalidArgument("weights must sum to one");
}

WeightVector
WeightVector::uniform(std::size_t n)
{
  if (n == 0)
    throw InvalidArgument("weight vector is empty");
  return WeightVector(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n));
}

WeightVector
WeightVector::point_mass(std::size_t n, std::size_t k)
{
  if (k >= n)
    throw InvalidArgument("point-mass index out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  w[static_cast<Eigen::Index>(k)] = 1.0;
  return WeightVector(std::move(w));
}

namespace {

// Kernel value as a function of the squared norm ||u||^2.
double
kernel_of_sq_norm(KernelFamily family, double r2)
{
  switch (family) {
    case KernelFamily::uniform:
      return r2 <= 1.0 ? 1.0 : 0.0;
    case KernelFamily::epanechnikov:
      return r2 <= 1.0 ? 1.0 - r2 : 0.0;
    case KernelFamily::gaussian:
      return std::exp(-0.5 * r2);
  }
  return 0.0;
}

void
check_inputs(const Eigen::Ref<const Eigen::MatrixXd>& X,
             const Eigen::Ref<const Eigen::VectorXd>& x0,
             double h)
{
  if (X.rows() < 1)
    throw InvalidArgument("need at least one covariate row");
  if (X.cols() != x0.size())
    throw InvalidArgument("covariate dimension mismatch between X and x0");
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidArgument("bandwidth must be positive and finite");
  if (!X.allFinite() || !x0.allFinite())
    throw InvalidArgument("covariates must be finite");
}

// Scaled squared distances ||(x_i - x0)/h||^2.
Eigen::VectorXd
scaled_sq_distances(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& x0,
                    double h)
{
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::VectorXd s(n);
  const double inv_h = 1.0 / h;
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double u = (X(i, j) - x0[j]) * inv_h;
      acc += u * u;
    }
    s[i] = acc;
  }
  return s;
}

} // namespace

double
kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u)
{
  if (!u.allFinite())
    throw InvalidArgument("kernel argument must be finite");
  return kernel_of_sq_norm(spec.family, u.squaredNorm());
}

double
bandwidth(const BandwidthSchedule& sched, std::size_t n)
{
  if (n == 0)
    throw InvalidArgument("bandwidth needs n >= 1");
  return sched.h0() * std::pow(static_cast<double>(n), -sched.delta());
}

WeightVector
nw_weights(const Eigen::Ref<const Eigen::MatrixXd>& X,
           const Eigen::Ref<const Eigen::VectorXd>& x0,
           const KernelSpec& spec,
           double h)
{
  check_inputs(X, x0, h);
  const Eigen::VectorXd s = scaled_sq_distances(X, x0, h);
  Eigen::VectorXd k(s.size());

  if (spec.family == KernelFamily::gaussian) {
    // log K = -s/2; shift by the largest log-value so the biggest weight is 1
    const double shift = 0.5 * s.minCoeff();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      k[i] = std::exp(shift - 0.5 * s[i]);
  } else {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      k[i] = kernel_of_sq_norm(spec.family, s[i]);
  }

  const double total = k.sum();
  if (total == 0.0)
    throw EmptyNeighborhood(h * std::sqrt(s.minCoeff()), h);
  k /= total;
  return WeightVector(std::move(k));
}

double
kde(const Eigen::Ref<const Eigen::MatrixXd>& X,
    const Eigen::Ref<const Eigen::VectorXd>& x0,
    const KernelSpec& spec,
    double h)
{
  check_inputs(X, x0, h);
  const Eigen::VectorXd s = scaled_sq_distances(X, x0, h);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    total += kernel_of_sq_norm(spec.family, s[i]);
  const double n = static_cast<double>(X.rows());
  return total / (n * std::pow(h, static_cast<double>(X.cols())));
}

double
kernel_r2(const KernelSpec& spec, int d_x)
{
  if (d_x < 1)
    throw InvalidArgument("kernel_r2 needs d_x >= 1");
  const double d = d_x;
  const double pi_half_d = std::pow(std::numbers::pi, d / 2.0);
  // volume of the unit ball and surface area of the unit sphere
  const double ball = pi_half_d / std::tgamma(d / 2.0 + 1.0);
  const double sphere = 2.0 * pi_half_d / std::tgamma(d / 2.0);
  switch (spec.family) {
    case KernelFamily::gaussian:
      return pi_half_d;
    case KernelFamily::uniform:
      return ball;
    case KernelFamily::epanechnikov:
      // sphere * int_0^1 (1 - r^2)^2 r^(d-1) dr
      return sphere * 8.0 / (d * (d + 2.0) * (d + 4.0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double
kernel_mass(const KernelSpec& spec, int d_x)
{
  if (d_x < 1)
    throw InvalidArgument("kernel_mass needs d_x >= 1");
  const double d = d_x;
  const double ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  switch (spec.family) {
    case KernelFamily::gaussian:
      return std::pow(2.0 * std::numbers::pi, d / 2.0);
    case KernelFamily::uniform:
      return ball;
    case KernelFamily::epanechnikov:
      return ball * 2.0 / (d + 2.0);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double
sum_sq_weights(const WeightVector& w)
{
  return w.values().squaredNorm();
}

} // namespace wsaa
