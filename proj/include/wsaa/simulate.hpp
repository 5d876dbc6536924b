#pragma once

#include "wsaa/costs.hpp"
#include "wsaa/rng.hpp"

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

namespace wsaa {

//! Two independent covariates X1 ~ Normal(20, sd 2), X2 ~ LogNormal(1, sd 0.3);
//! Y | X is Normal(mean(X), sd 3) left-truncated at zero with
//! mean(X) = 100 + (X1 - 20) + X2 * step(X2).
struct NewsvendorDgp
{
  double x1_mean = 20.0;
  double x1_sd = 2.0;
  double x2_log_mean = 1.0;
  double x2_log_sd = 0.3;
  double base = 100.0;
  double noise_sd = 3.0;
};

//! X1 ~ Normal(10, var 4), X2 ~ Normal(8, var 1);
//! Y | X ~ Normal((log(X1 + 4) + 5, sqrt|X2| + 10), noise_sd^2 I).
struct QuarticDgp
{
  double x1_mean = 10.0;
  double x1_sd = 2.0;
  double x2_mean = 8.0;
  double x2_sd = 1.0;
  double noise_sd = 1.0;
};

//! Synthetic weather -> hourly demand process: X = (feels-like temperature in
//! C, wind speed in kph), demand peaks at moderate temperature and low wind,
//! with multiplicative lognormal noise. Not fitted to any real data.
struct WeatherDgp
{
  double temp_mean = 15.0;
  double temp_sd = 9.0;
  double wind_log_mean = 2.2;
  double wind_log_sd = 0.5;
  double base_demand = 300.0;
  double peak_demand = 2500.0;
  double peak_temp = 22.0;
  double temp_width = 10.0;
  double wind_scale = 20.0;
  double noise_log_sd = 0.2;
};

//! Test law: X ~ Uniform(0,1)^d_x and Y ~ Uniform(lo, hi) independent of X.
struct UniformDgp
{
  int d_x = 1;
  double lo = 0.0;
  double hi = 1.0;
};

class Simulator
{
public:
  using Params = std::variant<NewsvendorDgp, QuarticDgp, WeatherDgp, UniformDgp>;

  explicit Simulator(Params params);

  const Params& params() const noexcept { return params_; }
  std::string_view name() const;
  int d_x() const;
  int d_y() const;

  template<class T>
  const T* as() const noexcept
  {
    return std::get_if<T>(&params_);
  }

private:
  Params params_;
};

struct Dataset
{
  Eigen::MatrixXd X; // n x d_x
  Eigen::MatrixXd Y; // n x d_y

  Eigen::Index size() const noexcept { return X.rows(); }
};

//! Coefficient of X2 in the newsvendor mean on the right-closed intervals
//! (-inf, 2], (2, 4], (4, 6], (6, inf).
double newsvendor_step(double x2);
//! Pre-truncation conditional mean of the newsvendor process.
double newsvendor_mean(const NewsvendorDgp& dgp, double x1, double x2);
Eigen::VectorXd quartic_mean(const QuarticDgp& dgp, double x1, double x2);
double weather_mean(const WeatherDgp& dgp, double temp, double wind);

Dataset sample_dataset(const Simulator& sim, std::size_t n, RngStream& rng);

//! N draws of Y | X = x0, one per row.
Eigen::MatrixXd sample_conditional(const Simulator& sim,
                                   const Eigen::VectorXd& x0,
                                   std::size_t N,
                                   RngStream& rng);

//! Componentwise quantiles of the covariate marginals.
Eigen::VectorXd covariate_quantile(const Simulator& sim, double tau);

//! Quartic cost with a_j ~ Normal(20, variance 15) (redrawn if not positive)
//! and b_j ~ Uniform[-5, -1].
CostModel make_quartic_cost(int d, RngStream& rng);

struct OracleResult
{
  Eigen::VectorXd z;
  double f = 0.0;
  //! Standard error of f from the empirical variance of F(z; Y).
  double std_error = 0.0;
  std::size_t samples = 0;
};

//! Solves the equal-weight problem over N conditional draws at x0.
OracleResult oracle_optimal_value(const Simulator& sim,
                                  const Eigen::VectorXd& x0,
                                  const CostModel& model,
                                  const FeasibleBox& box,
                                  std::size_t N,
                                  RngStream& rng);

//! Same as above for a user-supplied sample of outcomes.
OracleResult oracle_from_outcomes(Eigen::MatrixXd outcomes, const CostModel& model, const FeasibleBox& box);

// CSV with header x1,..,x{d_x},y1,..,y{d_y}; doubles written in shortest
// round-trip form.
void write_dataset_csv(const Dataset& data, std::ostream& out);
void save_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::string& path);

} // namespace wsaa
