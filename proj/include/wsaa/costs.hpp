#pragma once

#include "wsaa/kernels.hpp"

#include <Eigen/Core>
#include <string_view>
#include <variant>

namespace wsaa {

//! c_u (y - z)^+ + c_o (z - y)^+
struct NewsvendorCost
{
  double cu;
  double co;
};

//! c_u (y - z)^2 1{y >= z} + c_o (z - y)^2 1{y < z}
struct ExpectileCost
{
  double cu;
  double co;
};

//! sum_j a_j (z_j - b_j y_j)^4
struct QuarticCost
{
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

class CostModel
{
public:
  using Kind = std::variant<NewsvendorCost, ExpectileCost, QuarticCost>;

  static CostModel newsvendor(double cu, double co);
  static CostModel expectile(double cu, double co);
  static CostModel quartic(Eigen::VectorXd a, Eigen::VectorXd b);

  const Kind& kind() const noexcept { return kind_; }
  std::string_view name() const;
  int d_z() const noexcept { return d_z_; }
  int d_y() const noexcept { return d_z_; }
  //! False only for the newsvendor cost.
  bool differentiable() const noexcept;
  //! c_u / (c_u + c_o) for the newsvendor and expectile costs.
  double critical_level() const;

  template<class T>
  const T* as() const noexcept
  {
    return std::get_if<T>(&kind_);
  }

private:
  CostModel(Kind kind, int d)
    : kind_(std::move(kind))
    , d_z_(d)
  {}

  Kind kind_;
  int d_z_;
};

class FeasibleBox
{
public:
  FeasibleBox(Eigen::VectorXd lower, Eigen::VectorXd upper);

  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }
  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  double diameter() const { return (upper_ - lower_).norm(); }
  Eigen::VectorXd midpoint() const { return 0.5 * (lower_ + upper_); }

  //! Euclidean projection (componentwise clipping).
  Eigen::VectorXd project(const Eigen::VectorXd& z) const;
  bool contains(const Eigen::VectorXd& z, double tol = 1e-10) const;

private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

//! The weighted problem min_{z in box} sum_i w_i F(z; y_i). Outcomes are the
//! rows of an n x d_y matrix. Immutable once built.
class WsaaProblem
{
public:
  WsaaProblem(Eigen::MatrixXd outcomes, WeightVector weights, CostModel model, FeasibleBox box);

  const Eigen::MatrixXd& outcomes() const noexcept { return y_; }
  const WeightVector& weights() const noexcept { return w_; }
  const CostModel& model() const noexcept { return model_; }
  const FeasibleBox& box() const noexcept { return box_; }
  Eigen::Index size() const noexcept { return y_.rows(); }

private:
  Eigen::MatrixXd y_;
  WeightVector w_;
  CostModel model_;
  FeasibleBox box_;
};

double cost_value(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y);
//! Minimal-norm subgradient of the newsvendor cost; WrongModel otherwise.
Eigen::VectorXd cost_subgradient(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y);
//! WrongModel for the newsvendor cost.
Eigen::VectorXd cost_gradient(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y);
Eigen::MatrixXd cost_hessian(const CostModel& model, const Eigen::VectorXd& z, const Eigen::VectorXd& y);

double wsaa_objective(const WsaaProblem& p, const Eigen::VectorXd& z);
Eigen::VectorXd wsaa_grad(const WsaaProblem& p, const Eigen::VectorXd& z);
Eigen::VectorXd wsaa_subgrad(const WsaaProblem& p, const Eigen::VectorXd& z);
Eigen::MatrixXd wsaa_hessian(const WsaaProblem& p, const Eigen::VectorXd& z);

//! f(z) - f(ref) accumulated from per-sample differences that are free of
//! cancellation, so optimality gaps stay accurate far below eps * f.
double wsaa_objective_gap(const WsaaProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& ref);

//! Per-sample costs F(z; y_i).
Eigen::VectorXd sample_costs(const CostModel& model,
                             const Eigen::Ref<const Eigen::MatrixXd>& outcomes,
                             const Eigen::VectorXd& z);

} // namespace wsaa
