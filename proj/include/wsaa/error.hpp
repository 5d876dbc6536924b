#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace wsaa {

//! Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

//! A compact kernel assigns zero mass to every sample.
class EmptyNeighborhood : public Error
{
public:
  EmptyNeighborhood(double min_distance, double bandwidth)
    : Error(message(min_distance, bandwidth))
    , min_distance_(min_distance)
    , bandwidth_(bandwidth)
  {}

  //! Smallest Euclidean distance ||x_i - x0|| in covariate units.
  double min_distance() const noexcept { return min_distance_; }
  double bandwidth() const noexcept { return bandwidth_; }

private:
  static std::string message(double d, double h)
  {
    std::ostringstream os;
    os << "empty kernel neighborhood: smallest distance " << d << " with bandwidth " << h;
    return os.str();
  }

  double min_distance_;
  double bandwidth_;
};

//! An operation was asked of a cost model that does not support it
//! (e.g. a gradient of the nonsmooth newsvendor cost).
class WrongModel : public Error
{
public:
  using Error::Error;
};

class CurvatureError : public Error
{
public:
  explicit CurvatureError(double min_eigenvalue)
    : Error(message(min_eigenvalue))
    , min_eigenvalue_(min_eigenvalue)
  {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
  static std::string message(double e)
  {
    std::ostringstream os;
    os << "Hessian not positive definite: min eigenvalue " << e;
    return os.str();
  }

  double min_eigenvalue_;
};

class UnsupportedDimension : public Error
{
public:
  using Error::Error;
};

class OracleFailure : public Error
{
public:
  using Error::Error;
};

class DegenerateDensity : public Error
{
public:
  using Error::Error;
};

class InvalidRegime : public Error
{
public:
  using Error::Error;
};

class InvalidGap : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

} // namespace wsaa
