#pragma once

#include "wsaa/solve.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsaa {

//! optimal: m = kappa log Gamma (linear), kappa log log Gamma (superlinear),
//! c0 Gamma^kappa (sublinear).
//! over_optimizing: m = c0 Gamma^kappa_tilde (linear),
//! kappa_tilde log Gamma (superlinear).
enum class AllocationRule
{
  optimal,
  over_optimizing
};

std::string_view to_string(AllocationRule rule);
AllocationRule parse_allocation_rule(std::string_view name);

struct AllocationExtras
{
  //! Polynomial-rule constant.
  double c0 = 1.0;
  //! Exponent (linear) or log multiplier (superlinear) of the over-optimizing rule.
  std::optional<double> kappa_tilde;
  //! Replaces kappa* in the optimal rule, for misallocation studies.
  std::optional<double> kappa_override;
};

struct AllocationPlan
{
  ConvergenceClass regime;
  AllocationRule rule;
  std::uint64_t gamma;
  std::uint64_t n;
  std::uint64_t m;
  double kappa_star;
  //! kappa used by the rule (kappa*, the override, or kappa_tilde).
  double kappa_used;
  //! Power of Gamma in the error rate, log factors ignored; NaN when no
  //! rate is stated for the combination.
  double rate_exponent;
  std::vector<std::string> warnings;
};

double kappa_star(const ConvergenceClass& regime, double delta, int d_x);

//! Throws InvalidArgument for gamma < 8, InvalidRegime for parameters outside
//! the regime's domain or an undefined rule/regime combination.
AllocationPlan allocate(const ConvergenceClass& regime,
                        AllocationRule rule,
                        std::uint64_t gamma,
                        double delta,
                        int d_x,
                        const AllocationExtras& extras = {});

//! 1 - a b lambda / L.
double theta_for_projected_gd(double lambda, double L, double a, double b);

double theoretical_rate(const ConvergenceClass& regime,
                        AllocationRule rule,
                        double delta,
                        int d_x,
                        const AllocationExtras& extras = {});

//! log(theta^(-1/(eta-1)) / (f_z0 - f_star)).
double initial_gap_psi(double theta, double eta, double f_z0, double f_star);

} // namespace wsaa
