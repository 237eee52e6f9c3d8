#include "fermi/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fermi/specfun.hpp"

namespace fermi::asymptotics {

namespace {

constexpr double pi = std::numbers::pi;

double J(double W, double a) {
  using specfun::cos_integral;
  using specfun::sin_integral;
  const double b = W + a;
  const double ci = cos_integral(std::abs(b)) - cos_integral(std::abs(a));
  const double si = sin_integral(b) - sin_integral(a);
  return b * (std::cos(a) * ci + std::sin(a) * si);
}

}  // namespace

cplx precursor_closed_form_A(double omega0, double r, double dtau) {
  if (!(omega0 > 0.0) || !(r > 0.0)) {
    throw std::domain_error("precursor_closed_form_A: omega0 and r must be > 0");
  }
  if (!(dtau > 0.0) || !(dtau < r)) {
    throw std::domain_error("precursor_closed_form_A: requires 0 < dtau < r");
  }
  const double y = omega0 * r;
  const double W = omega0 * dtau;
  return {0.0, (J(W, -y) - J(W, y)) / (4.0 * pi * pi * y)};
}

cplx wave_zone_disorder(double omega0, double sigma2, double dtau) {
  const double two_pi2 = 4.0 * pi * pi;
  return {0.0, -pi * sigma2 * omega0 * omega0 * omega0 * std::sin(omega0 * dtau) / (two_pi2 * two_pi2)};
}

cplx disorder_far_field(double omega0, double sigma2, double r, double dtau) {
  if (!(omega0 > 0.0) || !(r > 0.0)) {
    throw std::domain_error("disorder_far_field: omega0 and r must be > 0");
  }
  const double x = omega0 * dtau;
  const double r3 = r * r * r;
  const double two_pi3 = 8.0 * pi * pi * pi;
  const double shape = 2.0 * std::sin(x) - x * (1.0 + std::cos(x));
  return {0.0, -60.0 * sigma2 * shape / (two_pi3 * omega0 * omega0 * omega0 * r3 * r3)};
}

double crossover_r0(double sigma2, double omega0) { return sigma2 * omega0 * omega0; }

}  // namespace fermi::asymptotics
