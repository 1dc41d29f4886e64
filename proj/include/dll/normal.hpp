#pragma once

namespace dll {

/// Standard normal density.
double normal_pdf(double t);

/// Standard normal CDF, Phi(t).
double normal_cdf(double t);

/// Upper tail 1 - Phi(t), accurate far into the right tail.
double normal_sf(double t);

/// Probability mass Phi(b) - Phi(a) for a <= b, computed on whichever
/// tail keeps precision.
double normal_mass(double a, double b);

/// Inverse of Phi.
double normal_quantile(double p);

/// Upper alpha/2 critical value z_{alpha/2}.
double z_critical(double alpha);

}  // namespace dll
