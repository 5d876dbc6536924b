#include "wsaa/budget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wsaa {

std::string_view
to_string(AllocationRule rule)
{
  return rule == AllocationRule::optimal ? "optimal" : "over_optimizing";
}

AllocationRule
parse_allocation_rule(std::string_view name)
{
  if (name == "optimal")
    return AllocationRule::optimal;
  if (name == "over_optimizing" || name == "over-optimizing")
    return AllocationRule::over_optimizing;
  throw InvalidArgument("unknown allocation rule '" + std::string(name) + "'");
}

namespace {

using Regime = ConvergenceClass::Regime;

void
check_stat(double delta, int d_x)
{
  if (d_x < 1)
    throw InvalidArgument("d_x must be >= 1");
  if (!(delta > 0.0 && delta * d_x < 1.0))
    throw InvalidArgument("delta must lie in (0, 1/d_x)");
}

void
check_regime(const ConvergenceClass& c)
{
  // ConvergenceClass already validates; re-check in case of NaN-laden copies.
  if (c.regime() == Regime::linear && !(c.theta() > 0.0 && c.theta() < 1.0))
    throw InvalidRegime("linear regime needs theta in (0, 1)");
  if (c.regime() == Regime::superlinear && !(c.eta() > 1.0))
    throw InvalidRegime("superlinear regime needs eta > 1");
  if (c.regime() == Regime::sublinear && !(c.beta() > 0.0))
    throw InvalidRegime("sublinear regime needs beta > 0");
}

} // namespace

double
kappa_star(const ConvergenceClass& regime, double delta, int d_x)
{
  check_stat(delta, d_x);
  check_regime(regime);
  const double s = 1.0 - delta * d_x;
  switch (regime.regime()) {
    case Regime::sublinear:
      return s / (s + 2.0 * regime.beta());
    case Regime::linear:
      return s / (2.0 * std::log(1.0 / regime.theta()));
    case Regime::superlinear:
      return 1.0 / std::log(regime.eta());
  }
  return std::nan("");
}

double
theoretical_rate(const ConvergenceClass& regime, AllocationRule rule, double delta, int d_x, const AllocationExtras& ex)
{
  const double ks = kappa_star(regime, delta, d_x);
  const double s = 1.0 - delta * d_x;
  if (rule == AllocationRule::over_optimizing) {
    if (regime.regime() == Regime::linear && ex.kappa_tilde)
      return -(1.0 - *ex.kappa_tilde) * s / 2.0;
    if (regime.regime() == Regime::superlinear)
      return -s / 2.0;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double k = ex.kappa_override.value_or(ks);
  switch (regime.regime()) {
    case Regime::sublinear:
      // Optimization error k beta against statistical (1 - k) s / 2; they
      // balance at kappa*.
      return -std::min(k * regime.beta(), (1.0 - k) * s / 2.0);
    case Regime::linear:
      return k >= ks ? -s / 2.0 : -k * std::log(1.0 / regime.theta());
    case Regime::superlinear:
      return k >= ks ? -s / 2.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AllocationPlan
allocate(const ConvergenceClass& regime,
         AllocationRule rule,
         std::uint64_t gamma,
         double delta,
         int d_x,
         const AllocationExtras& ex)
{
  if (gamma < 8)
    throw InvalidArgument("budget gamma must be >= 8");
  const double ks = kappa_star(regime, delta, d_x);
  if (!(ex.c0 > 0.0) || !std::isfinite(ex.c0))
    throw InvalidArgument("c0 must be positive");
  if (ex.kappa_override && !(*ex.kappa_override > 0.0))
    throw InvalidArgument("kappa_override must be positive");

  const double G = static_cast<double>(gamma);
  const double lg = std::log(G);
  double kappa = ks;
  double raw = 0.0;
  if (rule == AllocationRule::optimal) {
    kappa = ex.kappa_override.value_or(ks);
    switch (regime.regime()) {
      case Regime::sublinear:
        raw = ex.c0 * std::pow(G, kappa);
        break;
      case Regime::linear:
        raw = kappa * lg;
        break;
      case Regime::superlinear:
        raw = kappa * std::log(lg);
        break;
    }
  } else {
    if (!ex.kappa_tilde || !(*ex.kappa_tilde > 0.0))
      throw InvalidArgument("over-optimizing rule needs a positive kappa_tilde");
    kappa = *ex.kappa_tilde;
    switch (regime.regime()) {
      case Regime::sublinear:
        throw InvalidRegime("over-optimizing rule is defined for the linear and superlinear regimes");
      case Regime::linear:
        if (kappa >= 1.0)
          throw InvalidArgument("linear over-optimizing exponent kappa_tilde must lie in (0, 1)");
        raw = ex.c0 * std::pow(G, kappa);
        break;
      case Regime::superlinear:
        raw = kappa * lg;
        break;
    }
  }

  std::vector<std::string> warnings;
  double rounded = std::round(raw);
  if (rounded < 1.0) {
    warnings.push_back("rule gives m < 1 at this budget; clamped to m = 1");
    rounded = 1.0;
  }
  if (rounded > G) {
    warnings.push_back("rule gives m > gamma; clamped to m = gamma");
    rounded = G;
  }
  const auto m = static_cast<std::uint64_t>(rounded);
  const std::uint64_t n = gamma / m;
  const double rate = theoretical_rate(regime, rule, delta, d_x, ex);
  return AllocationPlan{ regime, rule, gamma, n, m, ks, kappa, rate, std::move(warnings) };
}

double
theta_for_projected_gd(double lambda, double L, double a, double b)
{
  if (!(lambda > 0.0) || !(L > 0.0))
    throw InvalidArgument("lambda and L must be positive");
  if (lambda > L)
    throw InvalidArgument("strong convexity lambda cannot exceed smoothness L");
  if (!(a > 0.0 && a < 0.5) || !(b > 0.0 && b < 1.0))
    throw InvalidArgument("Armijo parameters need a in (0, 0.5) and b in (0, 1)");
  return 1.0 - a * b * lambda / L;
}

double
initial_gap_psi(double theta, double eta, double f_z0, double f_star)
{
  if (!(eta > 1.0))
    throw InvalidArgument("psi needs eta > 1");
  if (!(theta > 0.0))
    throw InvalidArgument("psi needs theta > 0");
  if (!(f_z0 > f_star))
    throw InvalidGap("psi needs f(z0) > f*");
  return -std::log(theta) / (eta - 1.0) - std::log(f_z0 - f_star);
}

} // namespace wsaa
