#pragma once

#include "wsaa/costs.hpp"
#include "wsaa/kernels.hpp"
#include "wsaa/rng.hpp"

#include <Eigen/Core>
#include <cstddef>

namespace testutil {

inline Eigen::VectorXd
vec(std::initializer_list<double> v)
{
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v)
    out[i++] = x;
  return out;
}

inline double
uniform(wsaa::RngStream& rng, double lo, double hi)
{
  return lo + (hi - lo) * rng.uniform();
}

inline Eigen::MatrixXd
random_matrix(wsaa::RngStream& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi)
{
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = uniform(rng, lo, hi);
  return m;
}

//! Random strictly positive weights normalized to one.
inline wsaa::WeightVector
random_weights(wsaa::RngStream& rng, Eigen::Index n)
{
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = 0.05 + rng.uniform();
  w /= w.sum();
  return wsaa::WeightVector(w);
}

inline wsaa::FeasibleBox
box1(double lo, double hi)
{
  return wsaa::FeasibleBox(vec({ lo }), vec({ hi }));
}

inline wsaa::FeasibleBox
box2(double lo, double hi)
{
  return wsaa::FeasibleBox(vec({ lo, lo }), vec({ hi, hi }));
}

} // namespace testutil
