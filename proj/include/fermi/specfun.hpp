#pragma once

// Sine and cosine integrals.
//
//   Si(x) = int_0^x sin(t)/t dt
//   Ci(x) = gamma + ln(x) + int_0^x (cos(t) - 1)/t dt,   x > 0
//
// Absolute accuracy is better than 1e-12 for |x| <= 1e4 (and far beyond).

namespace fermi::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

/// Throws std::domain_error for non-finite x.
double sin_integral(double x);

/// Throws std::domain_error for x <= 0 or non-finite x.
double cos_integral(double x);

/// Auxiliary functions f(x), g(x) with
///   Si(x) = pi/2 - f(x) cos(x) - g(x) sin(x)
///   Ci(x) = f(x) sin(x) - g(x) cos(x)
/// Defined for x > 0.
struct TrigAuxiliary {
  double f;
  double g;
};
TrigAuxiliary trig_auxiliary(double x);

}  // namespace fermi::specfun
