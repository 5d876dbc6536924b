#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <string_view>

namespace wsaa {

enum class KernelFamily
{
  uniform,
  epanechnikov,
  gaussian
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec
{
  KernelFamily family = KernelFamily::gaussian;
};

//! Bandwidth h_n = h0 * n^(-delta) for a d_x-dimensional covariate.
//!
//! delta must lie in (0, 1/d_x). Values at or below 1/(d_x + 4) are accepted
//! but flagged: the kernel estimate then carries a first-order bias and the
//! normal-approximation intervals are no longer centered.
class BandwidthSchedule
{
public:
  BandwidthSchedule(double h0, double delta, int d_x);

  double h0() const noexcept { return h0_; }
  double delta() const noexcept { return delta_; }
  int d_x() const noexcept { return d_x_; }
  bool outside_debiasing_range() const noexcept { return warn_; }

private:
  double h0_;
  double delta_;
  int d_x_;
  bool warn_;
};

//! Nonnegative weights summing to one.
class WeightVector
{
public:
  WeightVector() = default;
  //! Validates nonnegativity and |sum - 1| <= 1e-12.
  explicit WeightVector(Eigen::VectorXd weights);

  static WeightVector uniform(std::size_t n);
  static WeightVector point_mass(std::size_t n, std::size_t k);

  const Eigen::VectorXd& values() const noexcept { return w_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }

private:
  Eigen::VectorXd w_;
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u);

double bandwidth(const BandwidthSchedule& sched, std::size_t n);

//! Nadaraya-Watson weights of the rows of X at the query x0.
//! Throws EmptyNeighborhood when every kernel value is exactly zero.
WeightVector nw_weights(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& x0,
                        const KernelSpec& spec,
                        double h);

//! Kernel density estimate (n h^d)^-1 sum_i K((x_i - x0)/h).
double kde(const Eigen::Ref<const Eigen::MatrixXd>& X,
           const Eigen::Ref<const Eigen::VectorXd>& x0,
           const KernelSpec& spec,
           double h);

//! Roughness R_2(K), the integral of K^2 over R^d.
double kernel_r2(const KernelSpec& spec, int d_x);

//! Integral of K over R^d. The kernels are not normalized, so kde estimates
//! kernel_mass * p(x0); divide by it (and r2 by its square) before comparing
//! with density-scale quantities.
double kernel_mass(const KernelSpec& spec, int d_x);

double sum_sq_weights(const WeightVector& w);

} // namespace wsaa
