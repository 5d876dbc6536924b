#pragma once

#include "wsaa/costs.hpp"
#include "wsaa/kernels.hpp"
#include "wsaa/rng.hpp"
#include "wsaa/simulate.hpp"
#include "wsaa/solve.hpp"

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace wsaa {

struct CvGrid
{
  std::vector<double> h0_candidates;
  //! Empty: the step constant of the budgeted solver config is used.
  std::vector<double> mu0_candidates;
  //! Empty: the initial point of the budgeted solver config is used.
  std::vector<Eigen::VectorXd> z0_candidates;
  int k = 5;

  void validate() const;
};

//! k folds of {0..n-1}: a uniform random permutation cut into contiguous
//! blocks whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, RngStream& rng);

struct CvCandidate
{
  double h0 = 0.0;
  std::optional<double> mu0;
  std::optional<Eigen::VectorXd> z0;
  //! (1/k) sum over folds of the out-of-fold cost sum; +inf if disqualified.
  double score = 0.0;
  std::vector<double> fold_scores;
  bool disqualified = false;
  std::string reason;
};

struct CvResult
{
  CvCandidate best;
  std::vector<CvCandidate> candidates;
};

struct CvSetup
{
  KernelSpec kernel;
  //! Bandwidth exponent; h = h0 n^-delta with n the full sample size.
  double delta = 0.2;
  CostModel model;
  FeasibleBox box;
  //! Budgeted fold solves when set (same m as the main run), exact otherwise.
  std::optional<SolverConfig> solver;
};

//! Selects the candidate with the smallest score; ties go to the smallest h0,
//! then the smallest mu0, then the lexicographically smallest z0.
CvResult kfold_cv(const Dataset& data,
                  const Eigen::VectorXd& x0,
                  const CvGrid& grid,
                  const CvSetup& setup,
                  RngStream& rng);

//! {0.25, 0.5, 1, 2, 4} times the mean covariate standard deviation.
std::vector<double> default_h0_grid(const Dataset& data);

} // namespace wsaa
