#pragma once

#include "wsaa/budget.hpp"
#include "wsaa/costs.hpp"
#include "wsaa/kernels.hpp"
#include "wsaa/simulate.hpp"
#include "wsaa/solve.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wsaa {

inline constexpr int kRecordsSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

struct QueryPoint
{
  //! Componentwise marginal quantile level; used when value is empty.
  std::optional<double> quantile;
  std::optional<Eigen::VectorXd> value;
};

struct UnconstrainedMode
{
  std::vector<std::uint64_t> n_list;
};

struct BudgetedMode
{
  std::vector<std::uint64_t> gamma_list;
  SolverAlgorithm algorithm;
  ConvergenceClass regime;
  AllocationRule rule = AllocationRule::optimal;
  AllocationExtras extras{};
  //! Use kappa* as the polynomial-rule constant c0.
  bool c0_is_kappa_star = false;
  //! Multiplies kappa* in the optimal rule (ignored when kappa_override is set).
  std::optional<double> kappa_scale{};
  //! Default: box midpoint.
  std::optional<Eigen::VectorXd> z0{};
};

//! Pilot cross-validation run once per grid point on a dataset of that
//! point's size; the selected parameters are shared by its replications.
struct CvConfig
{
  //! Empty: default_h0_grid of the pilot data.
  std::vector<double> h0_grid;
  std::vector<double> mu0_grid;
  std::vector<Eigen::VectorXd> z0_grid;
  int k = 5;
};

struct ExperimentConfig
{
  std::string name = "experiment";
  Simulator dgp;
  CostModel cost;
  FeasibleBox box;
  KernelSpec kernel{};
  double delta = 0.2;
  //! Fixed bandwidth constant; may be absent only when cv tunes it.
  std::optional<double> h0{};
  std::optional<CvConfig> cv{};
  QueryPoint x0{};
  std::variant<UnconstrainedMode, BudgetedMode> mode;
  std::size_t replications = 100;
  double alpha = 0.05;
  std::uint64_t base_seed = 1;
  std::size_t oracle_n = 1000000;
  //! 0: one per hardware thread.
  std::size_t workers = 1;
  //! Wall-clock timing in records; off keeps outputs byte-reproducible.
  bool timing = false;
  //! Canonical JSON of the source document, echoed into the summary.
  std::string source{};

  bool budgeted() const { return std::holds_alternative<BudgetedMode>(mode); }
  //! Throws ConfigError when inconsistent.
  void validate() const;
};

//! Parses the JSON configuration (comments allowed). Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ReplicationRecord
{
  std::size_t grid_index = 0;
  std::uint64_t rep_id = 0;
  //! 0 when unconstrained.
  std::uint64_t gamma = 0;
  std::uint64_t n = 0;
  //! 0 when unconstrained.
  std::uint64_t m = 0;
  double h = 0.0;
  double estimate = 0.0;
  double f_star = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double half_width = 0.0;
  bool covered = false;
  double optimization_error = 0.0;
  double statistical_error = 0.0;
  std::uint64_t solver_iterations = 0;
  double elapsed_ms = 0.0;
  bool failed = false;
  std::string failure;
};

//! Parameters a grid point runs with, after allocation and pilot CV.
struct GridPoint
{
  std::size_t index = 0;
  std::uint64_t gamma = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double h0 = 0.0;
  double h = 0.0;
  std::optional<SolverConfig> solver;
  std::optional<AllocationPlan> plan;
  std::optional<double> cv_score;
};

struct GridSummary
{
  GridPoint point;
  std::size_t replications = 0;
  std::size_t failures = 0;
  double coverage = 0.0;
  //! (upper - lower) / f*.
  double rel_width_mean = 0.0;
  double rel_width_sd = 0.0;
  //! sqrt(mean (estimate - f*)^2) / |f*|.
  double rel_rmse = 0.0;
  double mean_estimate = 0.0;
  double mean_optimization_error = 0.0;
  double mean_statistical_error = 0.0;
  //! KS test of the studentized pivots (estimate - f*) / sqrt(sigma^2 sum w^2).
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  bool degraded = false;
};

struct SlopeFit
{
  double slope;
  double stderr_;
  double intercept;
};

//! OLS of log(rmse) on log(size). Throws InvalidArgument for fewer than two
//! points or any nonpositive value. stderr_ is NaN with exactly two points.
SlopeFit fit_loglog_slope(const std::vector<double>& sizes, const std::vector<double>& rmses);

struct ExperimentSummary
{
  std::string name;
  bool budgeted = false;
  Eigen::VectorXd x0;
  OracleResult oracle;
  std::vector<GridSummary> grid;
  //! NaN when fewer than two grid points have a positive RMSE.
  double slope;
  double slope_stderr;
  double theoretical_rate;
  bool degraded = false;
  std::vector<std::string> warnings;
  std::string config_source;
};

struct ExperimentResult
{
  ExperimentSummary summary;
  std::vector<ReplicationRecord> records;
};

Eigen::VectorXd resolve_query_point(const ExperimentConfig& cfg);

//! Stream id of replication rep at grid point g.
std::uint64_t replication_stream(std::size_t grid_index, std::uint64_t rep_id);

//! Allocation and pilot CV for grid point g.
GridPoint prepare_grid_point(const ExperimentConfig& cfg, const Eigen::VectorXd& x0, std::size_t g);

ReplicationRecord run_replication(const ExperimentConfig& cfg,
                                  const Eigen::VectorXd& x0,
                                  const GridPoint& point,
                                  const OracleResult& oracle,
                                  std::uint64_t rep_id);

OracleResult compute_oracle(const ExperimentConfig& cfg, const Eigen::VectorXd& x0);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

GridSummary summarize_grid_point(const GridPoint& point,
                                 const std::vector<ReplicationRecord>& records,
                                 double alpha);

// records.csv / summary.json
void write_records_csv(const std::vector<ReplicationRecord>& records, std::ostream& out);
std::vector<ReplicationRecord> read_records_csv(std::istream& in);
void write_summary_json(const ExperimentSummary& summary, std::ostream& out);
//! Writes dir/records.csv and dir/summary.json, creating dir if needed.
void write_experiment_outputs(const ExperimentResult& result, const std::string& dir);

} // namespace wsaa
