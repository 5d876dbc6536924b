#pragma once

#include "wsaa/costs.hpp"
#include "wsaa/error.hpp"

#include <Eigen/Core>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wsaa {

//! Fixed step mu0 / sqrt(m + 1).
struct SubgradientMethod
{
  double mu0;
};

//! Projected gradient with Armijo backtracking (sufficient-decrease a, shrink b).
struct GradientArmijo
{
  double a;
  double b;
};

//! Projected Newton in the Hessian metric with Armijo backtracking.
struct NewtonArmijo
{
  double a;
  double b;
};

using SolverAlgorithm = std::variant<SubgradientMethod, GradientArmijo, NewtonArmijo>;

std::string algorithm_name(const SolverAlgorithm& algorithm);

struct SolverConfig
{
  SolverAlgorithm algorithm;
  std::size_t max_iters = 0;
  Eigen::VectorXd z0;

  //! Throws InvalidArgument unless mu0 > 0, a in (0, 0.5), b in (0, 1).
  void validate() const;
};

struct SolverTrace
{
  //! z^(0), ..., z^(iterations_used)
  std::vector<Eigen::VectorXd> iterates;
  //! Objective value at each iterate.
  std::vector<double> objective_values;
  //! Running minimum of objective_values.
  std::vector<double> best_objective_values;
  //! Backtracking exponent accepted at each iteration (0 for the subgradient method).
  std::vector<int> backtrack_counts;
  std::size_t iterations_used = 0;
  //! Index of the delivered point: the best iterate for the subgradient
  //! method, the last iterate otherwise.
  std::size_t delivered_index = 0;
  //! True for the subgradient method.
  bool delivers_best = false;

  const Eigen::VectorXd& delivered() const { return iterates.at(delivered_index); }
  double delivered_objective() const { return objective_values.at(delivered_index); }
};

class SolverFailure : public Error
{
public:
  using Error::Error;
};

//! Backtracking exhausted its exponent cap without sufficient decrease.
class StalledLineSearch : public SolverFailure
{
public:
  StalledLineSearch(const std::string& what, SolverTrace trace)
    : SolverFailure(what)
    , trace_(std::move(trace))
  {}
  const SolverTrace& trace() const noexcept { return trace_; }

private:
  SolverTrace trace_;
};

//! Largest accepted backtracking exponent.
inline constexpr int kMaxBacktracks = 60;

SolverTrace projected_subgradient(const WsaaProblem& p, const SolverConfig& cfg);
SolverTrace projected_gradient_armijo(const WsaaProblem& p, const SolverConfig& cfg);
SolverTrace projected_newton(const WsaaProblem& p, const SolverConfig& cfg);
//! Dispatches on cfg.algorithm.
SolverTrace run_solver(const WsaaProblem& p, const SolverConfig& cfg);

//! argmin over the box of (z - v)' H (z - v) / 2 by enumerating the 3^d
//! bound patterns; d <= 4.
Eigen::VectorXd h_metric_projection(const Eigen::MatrixXd& H, const Eigen::VectorXd& v, const FeasibleBox& box);

//! Smallest value whose cumulative weight reaches level (left-continuous
//! inverse of the weighted empirical CDF).
double weighted_quantile(const Eigen::Ref<const Eigen::VectorXd>& values, const WeightVector& w, double level);

//! Root of sum_i w_i [-2 cu (y_i - z)^+ + 2 co (z - y_i)^+] by bisection on
//! [min y, max y] to width 1e-12 (relative above 1).
double weighted_expectile(const Eigen::Ref<const Eigen::VectorXd>& values, const WeightVector& w, double cu, double co);

struct ExactSolution
{
  Eigen::VectorXd z;
  double value = 0.0;
  //! Newton iterations (quartic only).
  std::size_t iterations = 0;
};

ExactSolution solve_exact(const WsaaProblem& p);

// -- convergence classes ---------------------------------------------------

class ConvergenceClass
{
public:
  enum class Regime
  {
    sublinear,
    linear,
    superlinear
  };

  static ConvergenceClass sublinear(double beta);
  static ConvergenceClass linear(double theta);
  static ConvergenceClass superlinear(double theta, double eta);

  Regime regime() const noexcept { return regime_; }
  double beta() const noexcept { return beta_; }
  double theta() const noexcept { return theta_; }
  double eta() const noexcept { return eta_; }
  std::string name() const;

private:
  ConvergenceClass(Regime r, double beta, double theta, double eta)
    : regime_(r)
    , beta_(beta)
    , theta_(theta)
    , eta_(eta)
  {}

  Regime regime_;
  double beta_;
  double theta_;
  double eta_;
};

struct ConvergenceReport
{
  bool pass = true;
  //! Linear: max gap_t / gap_{t-1}. Sublinear: max t^beta gap_t.
  //! Superlinear: max gap_t / gap_{t-1}^eta.
  double worst_ratio = 0.0;
  //! Superlinear only: OLS fit of log gap_{t+1} = log theta + eta log gap_t
  //! over pairs with both gaps in (1e-12, 1e-2); NaN with fewer than 2 pairs.
  double fitted_theta = std::numeric_limits<double>::quiet_NaN();
  double fitted_eta = std::numeric_limits<double>::quiet_NaN();
  std::size_t fitted_pairs = 0;
  std::size_t checked_steps = 0;
};

//! Gaps below this are treated as converged.
inline constexpr double kConvergedGap = 1e-13;

//! Checks the defining inequality of cls along a sequence of optimality gaps.
//! For the sublinear regime the inequality needs a bound Delta; without one
//! the report only carries the observed max t^beta gap_t.
ConvergenceReport verify_convergence_class(const std::vector<double>& gaps,
                                           const ConvergenceClass& cls,
                                           std::optional<double> sublinear_bound = std::nullopt);

//! Gap sequence of a trace against f_star: the best-so-far values for the
//! subgradient method, the raw objective values otherwise.
ConvergenceReport verify_convergence_class(const SolverTrace& trace,
                                           double f_star,
                                           const ConvergenceClass& cls,
                                           std::optional<double> sublinear_bound = std::nullopt);

//! f(z_t) - f(z_star) for every iterate, accumulated per sample so gaps far
//! below eps * f stay accurate.
std::vector<double> trace_gaps(const WsaaProblem& p, const SolverTrace& trace, const Eigen::VectorXd& z_star);

} // namespace wsaa
