#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fermi/greens.hpp"
#include "fermi/quadrature.hpp"
#include "oracles.hpp"

using namespace fermi::quadrature;
using fermi::greens::DeltaTerm;
using fermi::greens::Regularization;

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

Kernel constant_kernel(cplx c) {
  return smooth_kernel([c](double) { return c; });
}

Regularization at_eps(double e) {
  Regularization r;
  r.eps = e;
  return r;
}
}  // namespace

TEST_CASE("Gauss-Legendre rule") {
  for (int n : {8, 16, 21}) {
    const auto g = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
    for (int k = 0; k < 2 * n; k += 2) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      CHECK(s == doctest::Approx(2.0 / (k + 1)).epsilon(1e-14));
    }
  }
  const auto g = gauss_legendre(20);
  const auto& bx = boost::math::quadrature::gauss<double, 20>::abscissa();
  const auto& bw = boost::math::quadrature::gauss<double, 20>::weights();
  for (std::size_t i = 0; i < bx.size(); ++i) {
    CHECK(g.nodes[10 + i] == doctest::Approx(bx[i]).epsilon(1e-15));
    CHECK(g.weights[10 + i] == doctest::Approx(bw[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("adaptive Gauss-Kronrod") {
  const QuadratureSpec spec;
  auto r = adaptive_integrate([](double x) { return cplx{std::sin(x)}; }, 0.0, pi, spec);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0) < 1e-14);
  CHECK(r.err_est < 1e-11);
  r = adaptive_integrate([](double x) { return cplx{std::log(x)}; }, 0.0, 1.0, spec);
  CHECK(std::abs(r.value + 1.0) < 1e-12);
  r = adaptive_integrate([](double x) { return cplx{std::sqrt(std::abs(x - 0.3))}; }, 0.0, 1.0, spec,
                         {0.3});
  const double ex = (2.0 / 3.0) * (std::pow(0.3, 1.5) + std::pow(0.7, 1.5));
  CHECK(std::abs(r.value - ex) < 1e-14);
  r = adaptive_integrate([](double x) { return std::exp(I * x); }, 1.0, 0.0, spec);
  CHECK(std::abs(r.value + (std::exp(I) - 1.0) / I) < 1e-14);
  CHECK(adaptive_integrate([](double) { return cplx{1.0}; }, 2.0, 2.0, spec).value == cplx{});
  QuadratureSpec bad;
  bad.gauss_nodes = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("window weight integrals of simple kernels") {
  const QuadratureSpec spec;
  CHECK(std::abs(weighted_xi_integral(constant_kernel(1.0), 0.0, 2.0, spec).value - 4.0) < 1e-14);
  for (double w : {0.5, 1.0, 7.0}) {
    const double D = 2.3;
    const auto r = weighted_xi_integral(constant_kernel(1.0), w, D, spec);
    CHECK(std::abs(r.value - 2.0 * (1.0 - std::cos(w * D)) / (w * w)) < 1e-14);
  }
}

TEST_CASE("delta terms are sifted") {
  const QuadratureSpec spec;
  Kernel k;
  k.deltas = {{-0.5, cplx{2.0, 1.0}}, {0.5, cplx{-1.0, 0.0}}};
  const double w = 1.3, D = 2.0;
  const auto r = weighted_xi_integral(k, w, D, spec);
  const cplx ex = (D - 0.5) * (cplx{2.0, 1.0} * std::exp(I * (0.5 * w)) - std::exp(-I * (0.5 * w)));
  CHECK(std::abs(r.value - ex) < 1e-15);
  // Outside the window: nothing; on the edge: half weight.
  Kernel edge;
  edge.deltas = {{-3.0, 1.0}, {1.0, 4.0}};
  const auto e = window_integral(edge, [](double) { return cplx{1.0}; }, 1.0, 0.0, spec);
  CHECK(e.value == cplx{2.0});
}

TEST_CASE("principal values by symmetric pairs") {
  const QuadratureSpec spec;
  for (double a : {-0.7, 0.0, 0.3}) {
    Kernel k = smooth_kernel([a](double x) { return cplx{1.0 / (x - a)}; });
    k.pv_poles = {a};
    const auto r = window_integral(k, [](double) { return cplx{1.0}; }, 1.0, 0.0, spec);
    CHECK(std::abs(r.value - std::log((1.0 - a) / (1.0 + a))) < 1e-13);
  }
  // Two poles, oscillating weight: PV int_{-D}^{D} e^{-i x} / (x^2 - y^2).
  const double y = 0.8, D = 2.0;
  Kernel k = smooth_kernel([y](double x) { return cplx{1.0 / (x * x - y * y)}; });
  k.pv_poles = {-y, y};
  const auto r = window_integral(k, [](double x) { return std::exp(-I * x); }, D, 1.0, spec);
  // Independent: subtract the poles analytically, integrate the rest.
  const auto rest = adaptive_integrate(
      [y](double x) {
        const double c = std::cos(y);
        const double num = std::cos(x) - c;
        return cplx{num / (x * x - y * y)};
      },
      -D, D, spec, {-y, y});
  const double pv_c = std::cos(y) / (2 * y) * 2.0 * std::log((D - y) / (D + y));
  CHECK(std::abs(r.value - (rest.value + pv_c)) < 1e-12);
  CHECK(std::abs(r.value.imag()) < 1e-15);
}

TEST_CASE("phase-sum integral") {
  const QuadratureSpec spec;
  const double t0 = 0.4, t1 = 2.1;
  for (double w : {0.0, 0.9, 3.0}) {
    for (int s : {-1, 1}) {
      const auto r = phase_sum_integral(constant_kernel(1.0), w, t0, t1, s, spec);
      const cplx one = w == 0.0 ? cplx{t1 - t0}
                                : (std::exp(double(s) * I * (w * t1)) - std::exp(double(s) * I * (w * t0))) /
                                      (double(s) * I * w);
      CHECK(std::abs(r.value - one * one) < 1e-13);
    }
  }
  CHECK_THROWS_AS(phase_sum_integral(constant_kernel(1.0), 1.0, 0.0, 1.0, 0, spec), std::invalid_argument);
  CHECK_THROWS_AS(phase_sum_integral(constant_kernel(1.0), 1.0, 1.0, 1.0, 1, spec), std::domain_error);
}

TEST_CASE("phase-sum with a regulated Wightman kernel against a tensor rule") {
  const QuadratureSpec spec;
  const double t0 = 0.2, t1 = 1.5, r = 0.6, w = 1.7;
  const auto reg = at_eps(0.2);
  Kernel k = smooth_kernel([&](double x) { return fermi::greens::wightman_free({x, r}, reg); });
  k.breakpoints = {-r, r};
  for (int s : {-1, 1}) {
    const auto q = phase_sum_integral(k, w, t0, t1, s, spec);
    const cplx box = oracle::box2(
        [&](double u, double v) {
          return std::exp(double(s) * I * (w * (u + v))) * fermi::greens::wightman_free({u - v, r}, reg);
        },
        t0, t1, 40);
    CHECK(std::abs(q.value - box) < 1e-7 * std::abs(box));
  }
}

TEST_CASE("weighted window equals the double time integral") {
  const QuadratureSpec spec;
  const double t0 = -0.3, t1 = 1.4, w = 2.2;
  auto K = [](double x) { return cplx{std::cos(3 * x), 0.5 * x * x}; };
  const auto q = weighted_xi_integral(smooth_kernel(K), w, t1 - t0, spec);
  const auto d = direct_double_integral(
      [&](double u, double v) { return std::exp(-I * (w * (u - v))) * K(u - v); }, t0, t1, spec, 4);
  CHECK(std::abs(q.value - d.value) < 1e-13);
}

TEST_CASE("direct double integral") {
  const QuadratureSpec spec;
  const auto d = direct_double_integral([](double u, double v) { return std::exp(I * (u - v)); }, 0.0,
                                        1.0, spec);
  CHECK(d.converged);
  CHECK(std::abs(d.value - (2.0 - 2.0 * std::cos(1.0))) < 1e-15);
}

TEST_CASE("ordered 4D regions: volumes and counts") {
  const QuadratureSpec spec;
  const double t0 = 0.5, t1 = 2.0, T = t1 - t0;
  auto one = [](const std::array<double, 4>&) { return cplx{1.0}; };
  CHECK(compatible_orderings({}) == 24);
  CHECK(compatible_orderings({{2, 4}, {2, 3}}) == 8);
  CHECK(compatible_orderings({{2, 4}, {3, 4}}) == 8);
  CHECK(compatible_orderings({{4, 3}, {3, 2}, {2, 1}}) == 1);
  CHECK(compatible_orderings({{1, 2}, {2, 1}}) == 0);
  CHECK(std::abs(ordered_integral_4d(one, {}, t0, t1, spec).value - std::pow(T, 4)) < 1e-14);
  CHECK(std::abs(ordered_integral_4d(one, {{2, 4}, {2, 3}}, t0, t1, spec).value - std::pow(T, 4) / 3) <
        1e-14);
  CHECK(std::abs(ordered_integral_4d(one, {{4, 3}, {3, 2}, {2, 1}}, t0, t1, spec).value -
                 std::pow(T, 4) / 24) < 1e-15);
  const auto z = ordered_integral_4d(one, {{1, 2}, {2, 1}}, t0, t1, spec);
  CHECK(z.value == cplx{});
  CHECK(z.evaluations == 0);
  CHECK_THROWS_AS(ordered_integral_4d(one, {{0, 1}}, t0, t1, spec), std::invalid_argument);
}

TEST_CASE("the 24 simplices tile the box") {
  const QuadratureSpec spec;
  auto f = [](const std::array<double, 4>& t) {
    return std::exp(I * (t[0] - t[1] + 2 * t[2])) * std::cos(t[3]) * (1.0 + t[0] * t[3]);
  };
  const auto a = ordered_integral_4d(f, {}, 0.0, 1.5, spec);
  const auto b = direct_quadruple_integral(f, 0.0, 1.5, spec, 2);
  CHECK(a.converged);
  CHECK(std::abs(a.value - b.value) < 1e-13 * std::abs(b.value));
  // Complementary regions add up.
  const auto c = ordered_integral_4d(f, {{2, 4}}, 0.0, 1.5, spec);
  const auto d = ordered_integral_4d(f, {{4, 2}}, 0.0, 1.5, spec);
  CHECK(std::abs(c.value + d.value - b.value) < 1e-13 * std::abs(b.value));
}

TEST_CASE("ordered region against quasi Monte Carlo") {
  const QuadratureSpec spec;
  const double t0 = 0.0, t1 = 1.0;
  auto f = [](const std::array<double, 4>& t) {
    return std::exp(I * (t[2] - t[3] - t[0] + t[1])) * (1.0 + t[0] * t[1] + t[2]);
  };
  const auto q = ordered_integral_4d(f, {{2, 4}, {3, 4}}, t0, t1, spec);
  const cplx mc = oracle::qmc4(f, [](const std::array<double, 4>& t) { return t[1] > t[3] && t[2] > t[3]; },
                               t0, t1, std::size_t{1} << 23);
  CHECK(std::abs(q.value - mc) < 1e-4 * std::abs(q.value));
}

TEST_CASE("epsilon extrapolation") {
  Regularization reg;
  auto r = eps_extrapolate([](double e) { return cplx{3.0 + 2.0 * e, -e}; }, reg);
  CHECK(std::abs(r.value - 3.0) < 1e-14);
  CHECK(r.raw_sequence.empty());
  r = eps_extrapolate([](double) { return cplx{1.5}; }, reg);
  CHECK(std::abs(r.value - 1.5) < 1e-15);
  CHECK(r.err_est < 1e-14);
  r = eps_extrapolate([](double e) { return cplx{std::cos(50.0 / e)}; }, reg);
  CHECK(r.raw_sequence.size() == reg.schedule.size());
  Regularization shortr;
  shortr.schedule = {1e-2, 5e-3};
  CHECK_THROWS_AS(eps_extrapolate([](double) { return cplx{}; }, shortr), std::invalid_argument);
}

TEST_CASE("double pole: finite part plus i pi delta-prime") {
  // int_{-1}^{1} e^x / (x - i0)^2 = -2 cosh 1 + PV int e^x/x + i pi = -2 cosh 1 + 2 Shi(1) + i pi.
  const QuadratureSpec spec;
  const Regularization reg;
  const auto r = eps_extrapolate(
      [&](double e) {
        return adaptive_integrate([e](double x) { return std::exp(x) / ((x - I * e) * (x - I * e)); },
                                  -1.0, 1.0, spec, {0.0});
      },
      reg);
  CHECK(std::abs(r.value - cplx{-0.971659518879030527812, pi}) < 1e-6);
}

TEST_CASE("even kernels: cosine-only form") {
  const QuadratureSpec spec;
  const auto reg = at_eps(1e-2);
  const double r = 2.0, D = 1.5, w = 1.0;
  Kernel k = smooth_kernel([&](double x) { return fermi::greens::disorder_I({x, r}, reg, {1.0}); });
  const auto full = weighted_xi_integral(k, w, D, spec);
  const auto half = adaptive_integrate(
      [&](double x) { return 2.0 * (D - x) * std::cos(w * x) * fermi::greens::disorder_I({x, r}, reg, {1.0}); },
      0.0, D, spec);
  CHECK(std::abs(full.value - half.value) < 1e-12 * std::abs(half.value));
}

TEST_CASE("result arithmetic") {
  IntegralResult a, b;
  a.value = {2.0, 1.0};
  a.err_est = 1e-10;
  b.value = {0.0, -3.0};
  b.err_est = 2e-10;
  b.regulated = true;
  const auto p = product(a, b);
  CHECK(p.value == a.value * b.value);
  CHECK(p.err_est >= std::abs(a.value) * 2e-10 + 3.0 * 1e-10);
  CHECK(p.regulated);
  const auto s = scaled(a, cplx{0.0, -2.0});
  CHECK(s.err_est == doctest::Approx(2e-10));
  CHECK(conj(a).value == std::conj(a.value));
  a.converged = false;
  CHECK_FALSE((a + b).converged);
  CHECK((a + b).err_est == doctest::Approx(3e-10));
}

TEST_CASE("reruns are bit identical") {
  const QuadratureSpec spec;
  const auto reg = at_eps(1e-3);
  Kernel k = smooth_kernel([&](double x) { return fermi::greens::feynman_free_ieps({x, 1.2}, reg); });
  k.breakpoints = {-1.2, 1.2};
  const auto a = weighted_xi_integral(k, 1.0, 3.0, spec);
  const auto b = weighted_xi_integral(k, 1.0, 3.0, spec);
  CHECK(a.value == b.value);
  CHECK(a.err_est == b.err_est);
  CHECK(a.evaluations == b.evaluations);
}

namespace {
struct PairCase {
  LabelPair first;
  LabelPair second;
  std::vector<TimeOrder> region;
};

const std::vector<PairCase>& pair_cases() {
  static const std::vector<PairCase> cases = {
      {{1, 2}, {3, 4}, {{2, 4}, {3, 4}}},
      {{1, 2}, {4, 3}, {{1, 3}, {3, 4}}},
      {{1, 4}, {2, 3}, {{2, 4}, {2, 3}}},
      {{1, 4}, {2, 3}, {{1, 2}, {4, 1}}},
      {{1, 3}, {2, 4}, {{4, 3}, {2, 4}, {2, 3}}},
  };
  return cases;
}

cplx ordered_product(const std::function<cplx(double)>& k1, const std::function<cplx(double)>& k2,
                     const PairCase& c, const std::array<double, 4>& phase, double t0, double t1,
                     const QuadratureSpec& spec) {
  const Integrand4 f = [&](const std::array<double, 4>& t) {
    double arg = 0.0;
    for (int i = 0; i < 4; ++i) arg += phase[i] * t[i];
    return std::polar(1.0, arg) * k1(t[c.first.a - 1] - t[c.first.b - 1]) *
           k2(t[c.second.a - 1] - t[c.second.b - 1]);
  };
  return ordered_integral_4d(f, c.region, t0, t1, spec).value;
}
}  // namespace

TEST_CASE("pair products agree with the ordered 4D rule") {
  const QuadratureSpec spec;
  const double t0 = 0.2, t1 = 1.7;
  // Spacelike Wightman kernels: no poles inside the window.
  const double y = 3.0;
  auto G = [y](double x) { return cplx{-1.0 / (4 * pi * pi * ((x - y) * (x + y))), 0.0}; };
  auto H = [](double x) { return cplx{std::cos(2 * x), 0.3 * x}; };
  for (const auto& phase : {std::array<double, 4>{-1, 1, 1, -1}, std::array<double, 4>{0.5, -1.3, 2.0, -1.2}}) {
    for (const auto& c : pair_cases()) {
      const auto p = pair_product_integral(smooth_kernel(G), c.first, smooth_kernel(H), c.second, phase,
                                           c.region, t0, t1, spec);
      const cplx q = ordered_product(G, H, c, phase, t0, t1, spec);
      CHECK(p.converged);
      CHECK(std::abs(p.value - q) < 1e-11 * std::abs(q));
    }
  }
}

TEST_CASE("pair products with regulated light-cone kernels agree with the 4D rule") {
  const QuadratureSpec spec;
  const double t0 = 0.2, t1 = 2.7, y = 1.0;
  const auto reg = at_eps(0.5);
  auto G = [&](double x) { return fermi::greens::wightman_free({x, y}, reg); };
  Kernel k = smooth_kernel(G);
  k.breakpoints = {-y, y};
  k.regulated = true;
  const std::array<double, 4> phase{-1, 1, 1, -1};
  for (const auto& c : pair_cases()) {
    const auto p = pair_product_integral(k, c.first, k, c.second, phase, c.region, t0, t1, spec);
    const cplx q = ordered_product(G, G, c, phase, t0, t1, spec);
    CHECK(p.converged);
    CHECK(p.regulated);
    CHECK(std::abs(p.value - q) < 1e-10 * std::abs(q));
  }
}

TEST_CASE("pair products with split light-cone kernels match the i-eps limit") {
  const QuadratureSpec spec;
  const double t0 = 0.2, t1 = 2.7, y = 1.0;
  Kernel split;
  split.smooth = [y](double x) { return cplx{-1.0 / (4 * pi * pi * ((x - y) * (x + y))), 0.0}; };
  split.pv_poles = {-y, y};
  split.deltas = fermi::greens::wightman_free_split({0.0, y}).deltas;
  const std::array<double, 4> phase{-1, 1, 1, -1};
  for (std::size_t i : {0u, 3u}) {
    const auto& c = pair_cases()[i];
    const auto p = pair_product_integral(split, c.first, split, c.second, phase, c.region, t0, t1, spec);
    const auto lim = eps_extrapolate(
        [&](double e) {
          const auto reg = at_eps(e);
          Kernel k = smooth_kernel([reg, y](double x) { return fermi::greens::wightman_free({x, y}, reg); });
          k.breakpoints = {-y, y};
          return pair_product_integral(k, c.first, k, c.second, phase, c.region, t0, t1, spec);
        },
        Regularization{});
    CHECK(p.converged);
    CHECK_FALSE(p.regulated);
    CHECK(std::abs(p.value - lim.value) <= lim.err_est);
    CHECK(std::abs(p.value - lim.value) < 1e-6 * std::abs(p.value));
  }
}

TEST_CASE("pair product validation") {
  const QuadratureSpec spec;
  const Kernel one = constant_kernel(1.0);
  const std::array<double, 4> zero{0, 0, 0, 0};
  CHECK_THROWS_AS(pair_product_integral(one, {1, 2}, one, {2, 3}, zero, {}, 0.0, 1.0, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_product_integral(one, {1, 2}, one, {3, 5}, zero, {}, 0.0, 1.0, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_product_integral(one, {1, 2}, one, {3, 4}, {1, 0, 0, 0}, {}, 0.0, 1.0, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_product_integral(one, {1, 2}, one, {3, 4}, zero, {}, 1.0, 1.0, spec),
                  std::domain_error);
  // Contradictory orderings leave nothing to integrate.
  const auto empty = pair_product_integral(one, {1, 2}, one, {3, 4}, zero, {{1, 2}, {2, 1}}, 0.0, 1.0, spec);
  CHECK(empty.value == cplx{});
  // Unconstrained, unit kernels: the full box.
  const auto box = pair_product_integral(one, {1, 2}, one, {3, 4}, zero, {}, 0.0, 1.5, spec);
  CHECK(std::abs(box.value - std::pow(1.5, 4)) < 1e-13);
}
