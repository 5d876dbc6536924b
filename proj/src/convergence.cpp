#include "wsaa/solve.hpp"

#include <algorithm>
#include <cmath>

namespace wsaa {

ConvergenceClass
ConvergenceClass::sublinear(double beta)
{
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidRegime("sublinear class needs beta > 0");
  return { Regime::sublinear, beta, std::nan(""), std::nan("") };
}

ConvergenceClass
ConvergenceClass::linear(double theta)
{
  if (!(theta > 0.0 && theta < 1.0))
    throw InvalidRegime("linear class needs theta in (0, 1)");
  return { Regime::linear, std::nan(""), theta, std::nan("") };
}

ConvergenceClass
ConvergenceClass::superlinear(double theta, double eta)
{
  if (!(theta > 0.0) || !std::isfinite(theta) || !(eta > 1.0) || !std::isfinite(eta))
    throw InvalidRegime("superlinear class needs theta > 0 and eta > 1");
  return { Regime::superlinear, std::nan(""), theta, eta };
}

std::string
ConvergenceClass::name() const
{
  switch (regime_) {
    case Regime::sublinear:
      return "sublinear";
    case Regime::linear:
      return "linear";
    case Regime::superlinear:
      return "superlinear";
  }
  return "";
}

namespace {

// Relative slack for ratios that meet the bound exactly in exact arithmetic.
constexpr double kSlack = 1e-12;

bool
converged(double gap)
{
  return !(gap > kConvergedGap);
}

} // namespace

ConvergenceReport
verify_convergence_class(const std::vector<double>& gaps, const ConvergenceClass& cls, std::optional<double> bound)
{
  ConvergenceReport rep;
  const std::size_t T = gaps.size();

  switch (cls.regime()) {
    case ConvergenceClass::Regime::linear:
    case ConvergenceClass::Regime::superlinear: {
      const bool lin = cls.regime() == ConvergenceClass::Regime::linear;
      for (std::size_t t = 1; t < T; ++t) {
        if (converged(gaps[t]))
          continue;
        ++rep.checked_steps;
        double ratio = std::numeric_limits<double>::infinity();
        if (!converged(gaps[t - 1]))
          ratio = lin ? gaps[t] / gaps[t - 1] : gaps[t] / std::pow(gaps[t - 1], cls.eta());
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      }
      rep.pass = rep.worst_ratio <= cls.theta() * (1.0 + kSlack);
      if (!lin) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t k = 0;
        for (std::size_t t = 1; t < T; ++t) {
          const double a = gaps[t - 1], b = gaps[t];
          if (a > 1e-12 && a < 1e-2 && b > 1e-12 && b < 1e-2) {
            const double x = std::log(a), y = std::log(b);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++k;
          }
        }
        rep.fitted_pairs = k;
        if (k >= 2) {
          const double kd = static_cast<double>(k);
          const double den = kd * sxx - sx * sx;
          if (den > 0.0) {
            rep.fitted_eta = (kd * sxy - sx * sy) / den;
            rep.fitted_theta = std::exp((sy - rep.fitted_eta * sx) / kd);
          }
        }
      }
      break;
    }
    case ConvergenceClass::Regime::sublinear: {
      for (std::size_t t = 1; t < T; ++t) {
        if (converged(gaps[t]))
          continue;
        ++rep.checked_steps;
        rep.worst_ratio = std::max(rep.worst_ratio, std::pow(static_cast<double>(t), cls.beta()) * gaps[t]);
      }
      rep.pass = !bound || rep.worst_ratio <= *bound * (1.0 + kSlack);
      break;
    }
  }
  return rep;
}

ConvergenceReport
verify_convergence_class(const SolverTrace& trace,
                         double f_star,
                         const ConvergenceClass& cls,
                         std::optional<double> bound)
{
  const auto& values = trace.delivers_best ? trace.best_objective_values : trace.objective_values;
  std::vector<double> gaps;
  gaps.reserve(values.size());
  for (double f : values)
    gaps.push_back(f - f_star);
  return verify_convergence_class(gaps, cls, bound);
}

} // namespace wsaa
