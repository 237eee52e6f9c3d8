#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fermi/greens.hpp"
#include "fermi/quadrature.hpp"

using namespace fermi::greens;
using fermi::quadrature::eps_extrapolate;

namespace {
constexpr double pi = std::numbers::pi;
Regularization with_eps(double e) {
  Regularization r;
  r.eps = e;
  return r;
}
}  // namespace

TEST_CASE("Feynman iε form") {
  const Regularization sched;
  const auto v = eps_extrapolate([](double e) { return feynman_free_ieps({0.0, 1.0}, with_eps(e)); }, sched);
  CHECK(std::abs(v.value - cplx{0.0, -1.0 / (4 * pi * pi)}) < 1e-12);
  CHECK(std::abs(v.value.imag() + 0.0253303) < 1e-7);
  CHECK(feynman_free_ieps({0.7, 2.0}, with_eps(1e-3)) == feynman_free_ieps({-0.7, 2.0}, with_eps(1e-3)));
  // eps -> 0 at (0.5, 1) equals the smooth split part
  const auto e = eps_extrapolate([](double x) { return feynman_free_ieps({0.5, 1.0}, with_eps(x)); }, sched);
  CHECK(std::abs(e.value - feynman_free_split({0.5, 1.0}).smooth) < 1e-12);
}

TEST_CASE("Feynman split form") {
  const auto k = feynman_free_split({0.0, 1.0});
  CHECK(std::abs(k.smooth - cplx{0.0, -1.0 / (4 * pi * pi)}) < 1e-17);
  REQUIRE(k.deltas.size() == 2);
  CHECK(k.deltas[0].location == -1.0);
  CHECK(k.deltas[1].location == 1.0);
  CHECK(k.deltas[0].weight == k.deltas[1].weight);
  CHECK(k.deltas[0].weight.real() == doctest::Approx(-1.0 / (8 * pi)));
  CHECK(std::abs(feynman_free_split({2.0, 1.0}).smooth - cplx{0.0, 1.0 / (4 * pi * pi * 3)}) < 1e-17);
  CHECK_THROWS_AS(feynman_free_split({1.0, 1.0}), OnLightConeError);
  CHECK_THROWS_AS(feynman_free_split({-3.0, 3.0}), OnLightConeError);
  CHECK_THROWS_AS(feynman_free_split({0.5, 0.0}), std::domain_error);
}

TEST_CASE("Wightman function") {
  const Regularization sched;
  const auto v = eps_extrapolate([](double e) { return wightman_free({0.0, 1.0}, with_eps(e)); }, sched);
  CHECK(std::abs(v.value - cplx{1.0 / (4 * pi * pi), 0.0}) < 1e-12);
  CHECK(wightman_free({-1.3, 2.0}, with_eps(1e-2)) == std::conj(wightman_free({1.3, 2.0}, with_eps(1e-2))));
  const cplx w0 = wightman_free({0.0, 0.0}, with_eps(1e-3));
  CHECK(w0.real() == doctest::Approx(1.0 / (4 * pi * pi * 1e-6)).epsilon(1e-12));
  CHECK(std::abs(w0.imag()) < 1e-3);
  const auto s = wightman_free_split({0.0, 1.0});
  CHECK(s.deltas[0].weight == cplx{0.0, 1.0 / (8 * pi)});
  CHECK(s.deltas[1].weight == cplx{0.0, -1.0 / (8 * pi)});
}

TEST_CASE("disorder numerator") {
  CHECK(disorder_F({1.0, 1.0}) == 16.0);
  CHECK(disorder_F({1.0, 2.0}) == 121.0);
  CHECK(disorder_F({0.0, 3.0}) == 0.0);
  CHECK(disorder_F({-0.7, 2.0}) == -disorder_F({0.7, 2.0}));
  // Expansion of t[5u^4 + 10u^2 r^2 + r^4] - 4u[u^4 - r^4] at u = t.
  for (double t : {0.3, 1.7, -2.2}) {
    for (double r : {0.5, 3.0}) {
      const double u = t;
      const double raw = t * (5 * std::pow(u, 4) + 10 * u * u * r * r + std::pow(r, 4)) -
                         4 * u * (std::pow(u, 4) - std::pow(r, 4));
      CHECK(disorder_F({t, r}) == doctest::Approx(raw).epsilon(1e-14));
    }
  }
}

TEST_CASE("disorder kernel I") {
  const Regularization sched;
  CHECK(disorder_I({0.4, 1.0}, with_eps(1e-3), {0.0}) == cplx{});
  const auto v = eps_extrapolate([](double e) { return disorder_I({1.0, 2.0}, with_eps(e), {1.0}); }, sched);
  const cplx expect{0.0, 6.0 / std::pow(2 * pi, 3) * 121.0 / -243.0};
  CHECK(std::abs(v.value - expect) < 1e-10 * std::abs(expect));
  CHECK(expect.imag() == doctest::Approx(-1.2045e-2).epsilon(1e-4));
  CHECK(disorder_I({-0.5, 2.0}, with_eps(1e-3), {1.0}) == disorder_I({0.5, 2.0}, with_eps(1e-3), {1.0}));
  CHECK(std::abs(disorder_I_spacelike({1.0, 2.0}, {1.0}) - expect) < 1e-15 * std::abs(expect));
  CHECK_THROWS_AS(disorder_I_spacelike({2.0, 2.0}, {1.0}), std::domain_error);
}

TEST_CASE("restricted and analytic positive-time kernels") {
  const auto reg = with_eps(1e-3);
  const DisorderModel dm{1.0};
  CHECK(disorder_I_plus({-1.0, 2.0}, reg, dm) == cplx{});
  CHECK(disorder_I_plus({1.0, 2.0}, reg, dm) == disorder_I({1.0, 2.0}, reg, dm));
  CHECK(disorder_I_plus({0.0, 2.0}, reg, dm) == 0.5 * disorder_I({0.0, 2.0}, reg, dm));
  CHECK(disorder_I_plus({1.0, 2.0}, reg, {2.0}) == 2.0 * disorder_I_plus({1.0, 2.0}, reg, dm));
  // The Wightman companion: I(dt) = th(dt) W(dt) + th(-dt) W(-dt), W Hermitian.
  for (double t : {-3.0, -0.4, 0.9, 2.5}) {
    const cplx w = disorder_wightman({t, 2.0}, reg, dm);
    const cplx wm = disorder_wightman({-t, 2.0}, reg, dm);
    CHECK(std::abs(wm - std::conj(w)) <= 1e-15 * std::abs(w));
    const cplx i = disorder_I({t, 2.0}, reg, dm);
    CHECK(std::abs(i - (t > 0 ? w : wm)) <= 1e-15 * std::abs(i));
  }
  CHECK(disorder_wightman_spacelike({-0.5, 2.0}, dm) == -disorder_wightman_spacelike({0.5, 2.0}, dm));
}

TEST_CASE("spacelike disorder kernel is imaginary after extrapolation") {
  const Regularization sched;
  for (double t : {0.3, -0.8, 1.1}) {
    const auto v = eps_extrapolate([t](double e) { return disorder_I({t, 3.0}, with_eps(e), {0.5}); }, sched);
    CHECK(std::abs(v.value.real()) < 1e-10 * std::abs(v.value.imag()));
  }
}

TEST_CASE("I at negative dt differs from a uniform prescription") {
  // Same even numerator, one-sided (dt - i eps) in both branches.
  const DisorderModel dm{1.0};
  const double r = 2.0;
  auto uniform = [&](double t, double eps) {
    const cplx z{t, -eps};
    const cplx d = z * z - r * r;
    return cplx{0.0, 6.0 / std::pow(2 * pi, 3)} * disorder_F({std::abs(t), r}) / (d * d * d * d * d);
  };
  const double t = -1.2 * r;
  const cplx i = disorder_I({t, r}, with_eps(1e-2), dm);
  CHECK(std::abs(i - uniform(t, 1e-2)) > 1e-3 * std::abs(i));
  // Spacelike the difference vanishes with the regulator.
  const double ts = -0.5 * r;
  const double d1 = std::abs(disorder_I({ts, r}, with_eps(1e-2), dm) - uniform(ts, 1e-2));
  const double d2 = std::abs(disorder_I({ts, r}, with_eps(1e-4), dm) - uniform(ts, 1e-4));
  CHECK(d1 > 0.0);
  CHECK(d2 < 0.02 * d1);
}

TEST_CASE("near light cone flag and validation") {
  CHECK(near_light_cone({2.0 + 5e-3, 2.0}, with_eps(1e-3)));
  CHECK_FALSE(near_light_cone({2.1, 2.0}, with_eps(1e-3)));
  CHECK_THROWS_AS(feynman_free_ieps({0.0, -1.0}, with_eps(1e-3)), std::domain_error);
  CHECK_THROWS_AS(feynman_free_ieps({0.0, 1.0}, with_eps(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(disorder_I({0.0, 1.0}, with_eps(1e-3), {-1.0}), std::domain_error);
  Regularization bad;
  bad.schedule = {1e-2, 1e-3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.schedule = {1e-3, 1e-2, 1e-4};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.schedule = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("randomized symmetry properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    const double r = 0.1 + 6 * U(rng), t = -8 + 16 * U(rng);
    const auto reg = with_eps(std::pow(10.0, -5 + 4 * U(rng)));
    CHECK(feynman_free_ieps({t, r}, reg) == feynman_free_ieps({-t, r}, reg));
    CHECK(wightman_free({-t, r}, reg) == std::conj(wightman_free({t, r}, reg)));
    CHECK(disorder_I({t, r}, reg, {0.3}) == disorder_I({-t, r}, reg, {0.3}));
  }
}
