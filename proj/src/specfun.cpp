#include "fermi/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fermi::specfun {

namespace {

// Below this the Maclaurin series loses at most ~1 digit to cancellation;
// above it the continued fraction converges in < 60 terms.
constexpr double series_limit = 4.0;

struct SiCi {
  double si;
  double ci;
};

// Maclaurin series. Ci is returned without the gamma + ln x part.
SiCi maclaurin(double x) {
  double si = 0.0;
  double cin = 0.0;
  double term = x;  // x^(2k+1)/(2k+1)! with sign
  for (int k = 0; k < 60; ++k) {
    const double n = 2.0 * k + 1.0;
    const double s = term / n;
    si += s;
    // cos part: (-1)^m x^(2m) / ((2m)(2m)!) for m = k+1
    const double next = -term * x / (n + 1.0);  // x^(2k+2)/(2k+2)! with sign
    const double c = next / (n + 1.0);
    cin += c;
    term = next * x / (n + 2.0);
    if (std::abs(s) < 1e-18 * std::abs(si) && std::abs(c) < 1e-18 * (std::abs(cin) + 1e-300)) {
      break;
    }
  }
  return {si, cin};
}

// E1(i x) by modified Lentz on the continued fraction
//   E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...)))
// and then f + i g read off from E1(ix) e^{ix} = g - i f... see trig_auxiliary.
std::complex<double> e1_times_exp(double x) {
  using cplx = std::complex<double>;
  constexpr double tiny = 1e-300;
  const cplx z{0.0, x};
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 500; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) {
      return h;  // = e^{z} E1(z)
    }
  }
  throw std::runtime_error("trig_auxiliary: continued fraction did not converge");
}

}  // namespace

TrigAuxiliary trig_auxiliary(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("trig_auxiliary: x must be positive and finite");
  }
  if (x <= series_limit) {
    const auto s = maclaurin(x);
    const double si = s.si;
    const double ci = euler_gamma + std::log(x) + s.ci;
    const double sx = std::sin(x);
    const double cx = std::cos(x);
    const double a = std::numbers::pi / 2 - si;  // f cos + g sin
    return {a * cx + ci * sx, a * sx - ci * cx};
  }
  // e^{ix} E1(ix) = g(x) - i f(x)
  const auto h = e1_times_exp(x);
  return {-h.imag(), h.real()};
}

double sin_integral(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("sin_integral: non-finite argument");
  }
  const double ax = std::abs(x);
  double si = 0.0;
  if (ax <= series_limit) {
    si = maclaurin(ax).si;
  } else {
    const auto [f, g] = trig_auxiliary(ax);
    si = std::numbers::pi / 2 - f * std::cos(ax) - g * std::sin(ax);
  }
  return x < 0 ? -si : si;
}

double cos_integral(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("cos_integral: requires finite x > 0");
  }
  if (x <= series_limit) {
    return euler_gamma + std::log(x) + maclaurin(x).ci;
  }
  const auto [f, g] = trig_auxiliary(x);
  return f * std::sin(x) - g * std::cos(x);
}

}  // namespace fermi::specfun
