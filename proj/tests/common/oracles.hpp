#pragma once

// Straightforward reference implementations shared by the unit tests and the
// acceptance suite.

#include "wsaa/kernels.hpp"

#include <Eigen/Core>
#include <cmath>

namespace oracle {

//! Smallest candidate value whose cumulative weight reaches the level, by a
//! full scan per candidate.
inline double
quantile(const Eigen::VectorXd& y, const wsaa::WeightVector& w, double level)
{
  double best = INFINITY;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    double cum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] <= y[j])
        cum += w[static_cast<std::size_t>(i)];
    if (cum >= level - 1e-12 && y[j] < best)
      best = y[j];
  }
  return best;
}

//! Root of the expectile first-order condition by extended-precision bisection.
inline long double
expectile(const Eigen::VectorXd& y, const wsaa::WeightVector& w, long double cu, long double co)
{
  auto foc = [&](long double z) {
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const long double yi = y[i];
      const long double wi = w[static_cast<std::size_t>(i)];
      s += yi >= z ? -2.0L * cu * wi * (yi - z) : 2.0L * co * wi * (z - yi);
    }
    return s;
  };
  long double lo = y.minCoeff(), hi = y.maxCoeff();
  for (int it = 0; it < 200 && lo < hi; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    (foc(mid) < 0.0L ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

} // namespace oracle
