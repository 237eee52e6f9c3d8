#pragma once

// Independent reference computations for the unit tests. None of these
// call into the library's quadrature.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/sobol.hpp>

namespace oracle {

using cplx = std::complex<double>;
using ld = long double;

inline constexpr ld euler_gamma_ld = 0.577215664901532860606512090082402431L;

/// Si(x) by the Maclaurin series in long double; fine for |x| <= ~8.
inline ld si_series(ld x) {
  ld sum = 0, term = x;
  for (int k = 0; k < 200; ++k) {
    const ld n = 2 * k + 1;
    sum += term / n;
    term *= -x * x / ((n + 1) * (n + 2));
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

/// Ci(x) - gamma - ln x by the Maclaurin series in long double.
inline ld cin_series(ld x) {
  ld sum = 0, term = -x * x / 2;
  for (int k = 1; k < 200; ++k) {
    sum += term / (2 * k);
    term *= -x * x / ((2 * k + 1) * (2 * k + 2));
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

/// int_0^x g(t) dt with 30-point Gauss on panels of length <= 1.
template <class G>
ld panel_gauss(G g, ld x) {
  using boost::math::quadrature::gauss;
  const int n = std::max(1, static_cast<int>(std::ceil(static_cast<double>(x))));
  ld s = 0;
  for (int i = 0; i < n; ++i) {
    const ld a = x * i / n, b = x * (i + 1) / n;
    s += gauss<ld, 30>::integrate(g, a, b);
  }
  return s;
}

inline ld si_quadrature(ld x) {
  return panel_gauss([](ld t) { return t == 0 ? 1.0L : std::sin(t) / t; }, x);
}

inline ld ci_quadrature(ld x) {
  const ld tail = panel_gauss(
      [](ld t) { return t == 0 ? 0.0L : (std::cos(t) - 1) / t; }, x);
  return euler_gamma_ld + std::log(x) + tail;
}

/// Tensor Gauss-Legendre on [a, b]^2 with `panels` per axis (Boost nodes).
inline cplx box2(const std::function<cplx(double, double)>& f, double a, double b, int panels) {
  using boost::math::quadrature::gauss;
  const auto& x = gauss<double, 20>::abscissa();
  const auto& w = gauss<double, 20>::weights();
  std::vector<double> nodes, weights;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes.push_back(c + h * x[i]);
      weights.push_back(h * w[i]);
      if (x[i] != 0) {
        nodes.push_back(c - h * x[i]);
        weights.push_back(h * w[i]);
      }
    }
  }
  cplx s{};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    cplx row{};
    for (std::size_t j = 0; j < nodes.size(); ++j) row += weights[j] * f(nodes[i], nodes[j]);
    s += weights[i] * row;
  }
  return s;
}

/// Sobol quasi-Monte-Carlo over [a, b]^4; points violating `keep` are rejected
/// (contribute zero).
inline cplx qmc4(const std::function<cplx(const std::array<double, 4>&)>& f,
                 const std::function<bool(const std::array<double, 4>&)>& keep, double a, double b,
                 std::size_t npts) {
  boost::random::sobol gen(4);
  const double scale = 1.0 / static_cast<double>(gen.max() - gen.min()) ;
  cplx s{};
  std::array<double, 4> t{};
  for (std::size_t n = 0; n < npts; ++n) {
    for (auto& v : t) v = a + (b - a) * (static_cast<double>(gen() - gen.min()) + 0.5) * scale;
    if (keep(t)) s += f(t);
  }
  const double vol = std::pow(b - a, 4);
  return s * (vol / static_cast<double>(npts));
}

}  // namespace oracle
