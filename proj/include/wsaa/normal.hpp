#pragma once

namespace wsaa {

double normal_pdf(double x);
double normal_cdf(double x);

//! Standard normal quantile Phi^-1(p) for p in (0, 1).
//!
//! Acklam's rational approximation (relative error below 1.15e-9) followed by
//! one Halley step against erfc, which brings the result to near machine
//! precision.
double normal_quantile(double p);

} // namespace wsaa
