#include "fermi/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace fermi::scenarios {

using quadrature::Kernel;
using quadrature::TimeOrder;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double four_pi2 = 4.0 * pi * pi;

struct Scaled {
  double y;   // omega0 r
  double D;   // omega0 dtau
  double t0;  // omega0 tau0
  double s;   // sigma2 omega0^3
};

Scaled scale(const SystemParams& p) {
  const double w = p.omega0;
  return {w * p.r, w * p.dtau(), w * p.tau0, p.sigma2 * w * w * w};
}

double coupling4(const SystemParams& p) {
  const double l2 = p.lambda * p.lambda;
  return l2 * l2 / 16.0;
}

bool precursor(const Scaled& z) { return z.D < z.y; }

// ---- kernels in scaled variables -----------------------------------------

Kernel feynman_pv_kernel(double y) {
  Kernel k;
  k.smooth = [y](double x) { return cplx{0.0, 1.0 / (four_pi2 * ((x - y) * (x + y)))}; };
  k.pv_poles = {-y, y};
  return k;
}

Kernel feynman_delta_kernel(double y) {
  Kernel k;
  k.deltas = greens::feynman_free_split({0.0, y}).deltas;
  return k;
}

Kernel wightman_kernel(double y) {
  Kernel k;
  k.smooth = [y](double x) { return cplx{-1.0 / (four_pi2 * ((x - y) * (x + y))), 0.0}; };
  k.pv_poles = {-y, y};
  k.deltas = greens::wightman_free_split({0.0, y}).deltas;
  return k;
}

Kernel wightman_r0_kernel(const greens::Regularization& reg) {
  Kernel k;
  const double eps = reg.eps;
  k.smooth = [eps](double x) {
    greens::Regularization g;
    g.eps = eps;
    return greens::wightman_free({x, 0.0}, g);
  };
  k.breakpoints = {-10.0 * eps, 0.0, 10.0 * eps};
  k.regulated = true;
  return k;
}

Kernel disorder_I_kernel(const Scaled& z, const greens::Regularization& reg) {
  Kernel k;
  const greens::DisorderModel dm{z.s};
  const double y = z.y;
  if (precursor(z)) {
    k.smooth = [y, dm](double x) { return greens::disorder_I_spacelike({x, y}, dm); };
  } else {
    const double eps = reg.eps;
    k.smooth = [y, dm, eps](double x) {
      greens::Regularization g;
      g.eps = eps;
      return greens::disorder_I({x, y}, g, dm);
    };
    k.breakpoints = {-y, y};
    k.regulated = true;
  }
  return k;
}

// Scalar form of the disorder Wightman correction, per convention.
std::function<cplx(double)> disorder_wightman_fn(const Scaled& z, const EngineOptions& opt) {
  const greens::DisorderModel dm{z.s};
  const double y = z.y;
  const double eps = opt.reg.eps;
  const bool spacelike = precursor(z);
  if (opt.i_plus == IPlusConvention::Analytic) {
    if (spacelike) {
      return [y, dm](double x) { return greens::disorder_wightman_spacelike({x, y}, dm); };
    }
    return [y, dm, eps](double x) {
      greens::Regularization g;
      g.eps = eps;
      return greens::disorder_wightman({x, y}, g, dm);
    };
  }
  if (spacelike) {
    return [y, dm](double x) {
      if (x < 0.0) return cplx{};
      const cplx v = greens::disorder_I_spacelike({x, y}, dm);
      return x == 0.0 ? 0.5 * v : v;
    };
  }
  return [y, dm, eps](double x) {
    greens::Regularization g;
    g.eps = eps;
    return greens::disorder_I_plus({x, y}, g, dm);
  };
}

Kernel disorder_wightman_kernel(const Scaled& z, const EngineOptions& opt) {
  Kernel k;
  k.smooth = disorder_wightman_fn(z, opt);
  if (opt.i_plus == IPlusConvention::Restricted) k.breakpoints.push_back(0.0);
  if (!precursor(z)) {
    k.breakpoints.push_back(-z.y);
    k.breakpoints.push_back(z.y);
    k.regulated = true;
  }
  return k;
}

// ---- helpers ---------------------------------------------------------------

IntegralResult real_part(IntegralResult a) {
  a.value = {a.value.real(), 0.0};
  return a;
}

IntegralResult mod_sq(const IntegralResult& a) {
  return real_part(quadrature::product(a, quadrature::conj(a)));
}

// 2 Re(conj(a) b)
IntegralResult two_re_conj_product(const IntegralResult& a, const IntegralResult& b) {
  return real_part(quadrature::scaled(quadrature::product(quadrature::conj(a), b), 2.0));
}

ScenarioResult start(const SystemParams& p, const EngineOptions& opt, Scenario s, bool disorder) {
  p.validate();
  opt.validate();
  ScenarioResult r;
  r.params = p;
  r.scenario = s;
  r.with_disorder = disorder;
  return r;
}

void finish(ScenarioResult& r, bool report_residual) {
  const Scaled z = scale(r.params);
  r.regime = precursor(z) ? Regime::Precursor : Regime::LightCone;
  r.wave_zone = z.y >= wave_zone_threshold;
  r.regulated = false;
  r.converged = true;
  r.largest_term = 0.0;
  for (const auto& t : r.breakdown.terms) {
    if (!t.additive) continue;
    r.regulated = r.regulated || t.value.regulated;
    r.converged = r.converged && t.value.converged;
    r.largest_term = std::max(r.largest_term, std::abs(t.value.value));
  }
  r.probability_r_dependent = r.breakdown.total();
  if (report_residual && r.regime == Regime::Precursor) {
    r.breakdown.add("noncausal_residual", r.probability_r_dependent, false, r.with_disorder);
  }
}

// ---- scenario 3 groups -------------------------------------------------------

using quadrature::LabelPair;

struct Group {
  const char* name;
  LabelPair first;  // G(tau_a - tau_b), labels 1..4
  LabelPair second;
  std::vector<std::vector<TimeOrder>> regions;
};

const std::vector<Group>& deltaP_groups() {
  static const std::vector<Group> groups = {
      {"A", {1, 2}, {3, 4}, {{{2, 4}, {3, 4}}, {{1, 3}, {4, 3}}}},
      {"B", {1, 2}, {4, 3}, {{{2, 4}, {4, 3}}, {{1, 3}, {3, 4}}}},
      {"C",
       {1, 4},
       {2, 3},
       {{{2, 4}, {2, 3}}, {{3, 4}, {2, 3}}, {{4, 2}, {4, 1}}, {{1, 2}, {4, 1}}}},
  };
  return groups;
}

// e^{i(t3 - t4) - i(t1 - t2)}
constexpr std::array<double, 4> window_phase{-1.0, 1.0, 1.0, -1.0};

// sum_regions int phase * K1(first) K2(second)
IntegralResult pair_regions(const Kernel& k1, LabelPair first, const Kernel& k2, LabelPair second,
                            const std::vector<std::vector<TimeOrder>>& regions, const Scaled& z,
                            const quadrature::QuadratureSpec& spec) {
  IntegralResult acc;
  for (const auto& region : regions) {
    acc += quadrature::pair_product_integral(k1, first, k2, second, window_phase, region, z.t0,
                                             z.t0 + z.D, spec);
  }
  return acc;
}

void add_free_groups(ScenarioResult& r, const Scaled& z, double c, const EngineOptions& opt) {
  const Kernel G = wightman_kernel(z.y);
  for (const auto& g : deltaP_groups()) {
    const IntegralResult v = pair_regions(G, g.first, G, g.second, g.regions, z, opt.spec);
    r.breakdown.add(std::string("deltaP_group_") + g.name, quadrature::scaled(v, -c));
  }
}

void add_disorder_groups(ScenarioResult& r, const Scaled& z, double c, const EngineOptions& opt) {
  const Kernel G = wightman_kernel(z.y);
  const Kernel W = disorder_wightman_kernel(z, opt);
  for (const auto& g : deltaP_groups()) {
    IntegralResult v = pair_regions(G, g.first, W, g.second, g.regions, z, opt.spec);
    v += pair_regions(W, g.first, G, g.second, g.regions, z, opt.spec);
    r.breakdown.add(std::string("deltaP_disorder_group_") + g.name, quadrature::scaled(v, -c),
                    true, true);
  }
}

Kernel feynman_r0_kernel(const greens::Regularization& reg) {
  Kernel k;
  const double eps = reg.eps;
  k.smooth = [eps](double x) {
    greens::Regularization g;
    g.eps = eps;
    return greens::feynman_free_ieps({x, 0.0}, g);
  };
  k.breakpoints = {-10.0 * eps, 0.0, 10.0 * eps};
  k.regulated = true;
  return k;
}

// Second brace of Delta P: r = 0 pairs, plus complex conjugate.
IntegralResult deltaP_r0(const Scaled& z, double c, const EngineOptions& opt) {
  const Kernel G0 = wightman_r0_kernel(opt.reg);
  const Kernel F0 = feynman_r0_kernel(opt.reg);
  const std::vector<TimeOrder> base{{2, 4}, {2, 3}};
  const std::vector<TimeOrder> with43{{4, 3}, {2, 4}, {2, 3}};
  const auto& spec = opt.spec;

  IntegralResult sum = pair_regions(G0, {1, 3}, G0, {2, 4}, {base, with43}, z, spec);
  sum += pair_regions(G0, {1, 2}, F0, {3, 4}, {base}, z, spec);
  sum += pair_regions(G0, {1, 4}, G0, {2, 3}, {with43}, z, spec);
  sum.regulated = true;
  return real_part(quadrature::scaled(sum, -2.0 * c));
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::PhiF:
      return "phi_f";
    case Scenario::PsiF:
      return "psi_f";
    case Scenario::BigPhiF:
      return "Phi_f";
  }
  return "?";
}

const char* to_string(Regime r) { return r == Regime::Precursor ? "precursor" : "lightcone"; }

void SystemParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(omega0) || !(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
  if (!finite(r) || !(r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (!finite(lambda)) throw std::invalid_argument("lambda must be finite");
  if (!finite(tau0) || !finite(tau) || !(tau > tau0)) {
    throw std::invalid_argument("observation window needs tau > tau0");
  }
  if (!finite(sigma2) || !(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
}

void EngineOptions::validate() const {
  reg.validate();
  spec.validate();
}

void TermBreakdown::add(std::string label, IntegralResult value, bool additive, bool disorder) {
  terms.push_back({std::move(label), std::move(value), additive, disorder});
}

const Term* TermBreakdown::find(const std::string& label) const {
  for (const auto& t : terms) {
    if (t.label == label) return &t;
  }
  return nullptr;
}

IntegralResult TermBreakdown::total() const {
  IntegralResult sum;
  for (const auto& t : terms) {
    if (t.additive) sum += t.value;
  }
  return sum;
}

IntegralResult TermBreakdown::free_total() const {
  IntegralResult sum;
  for (const auto& t : terms) {
    if (t.additive && !t.disorder) sum += t.value;
  }
  return sum;
}

Amplitude amplitude_free_A(const SystemParams& p, const quadrature::QuadratureSpec& spec) {
  p.validate();
  const Scaled z = scale(p);
  Amplitude a;
  a.pv = quadrature::weighted_xi_integral(feynman_pv_kernel(z.y), 1.0, z.D, spec);
  a.delta = quadrature::weighted_xi_integral(feynman_delta_kernel(z.y), 1.0, z.D, spec);
  a.total = a.pv + a.delta;
  return a;
}

IntegralResult disorder_amplitude(const SystemParams& p, const EngineOptions& opt) {
  p.validate();
  opt.validate();
  const Scaled z = scale(p);
  return quadrature::weighted_xi_integral(disorder_I_kernel(z, opt.reg), 1.0, z.D, opt.spec);
}

ScenarioResult scenario1_free(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::PhiF, false);
  const double c = coupling4(p);
  const Amplitude a = amplitude_free_A(p, opt.spec);
  auto& b = r.breakdown;
  b.add("free_pv_part", quadrature::scaled(mod_sq(a.pv), c));
  b.add("free_delta_part", quadrature::scaled(mod_sq(a.delta), c));
  b.add("free_pv_delta_cross", quadrature::scaled(two_re_conj_product(a.pv, a.delta), c));
  b.add("free_amplitude_sq", quadrature::scaled(mod_sq(a.total), c), false);
  b.add("amplitude_pv", a.pv, false);
  b.add("amplitude_delta", a.delta, false);
  finish(r, false);
  return r;
}

ScenarioResult scenario1_disorder(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::PhiF, true);
  r.breakdown = scenario1_free(p, opt).breakdown;
  const double c = coupling4(p);
  const Amplitude a = amplitude_free_A(p, opt.spec);
  const IntegralResult I = disorder_amplitude(p, opt);
  r.breakdown.add("disorder_amplitude_I", I, false, true);
  r.breakdown.add("disorder_cross_G0_I", quadrature::scaled(two_re_conj_product(a.total, I), c),
                  true, true);
  finish(r, false);
  return r;
}

namespace {

void add_wightman_pair(ScenarioResult& r, const Scaled& z, double c, const EngineOptions& opt) {
  const Kernel W = wightman_kernel(z.y);
  const auto sm = quadrature::phase_sum_integral(W, 1.0, z.t0, z.t0 + z.D, -1, opt.spec);
  const auto sp = quadrature::phase_sum_integral(W, 1.0, z.t0, z.t0 + z.D, +1, opt.spec);
  r.breakdown.add("wightman_pair_r", quadrature::scaled(quadrature::product(sm, sp), c));
}

void add_r_independent_pair(ScenarioResult& r, const Scaled& z, double c,
                            const EngineOptions& opt) {
  if (!opt.include_r_independent) return;
  const Kernel W0 = wightman_r0_kernel(opt.reg);
  const auto m = quadrature::weighted_xi_integral(W0, 1.0, z.D, opt.spec);
  const auto p = quadrature::weighted_xi_integral(W0, -1.0, z.D, opt.spec);
  r.breakdown.add("r_independent", quadrature::scaled(quadrature::product(m, p), c), false);
}

void add_disorder_wightman_pair(ScenarioResult& r, const Scaled& z, double c,
                                const EngineOptions& opt) {
  const Kernel W = wightman_kernel(z.y);
  const Kernel dW = disorder_wightman_kernel(z, opt);
  const double a = z.t0;
  const double b = z.t0 + z.D;
  const auto sm = quadrature::phase_sum_integral(W, 1.0, a, b, -1, opt.spec);
  const auto sp = quadrature::phase_sum_integral(W, 1.0, a, b, +1, opt.spec);
  const auto dm = quadrature::phase_sum_integral(dW, 1.0, a, b, -1, opt.spec);
  const auto dp = quadrature::phase_sum_integral(dW, 1.0, a, b, +1, opt.spec);
  r.breakdown.add("disorder_I_plus_phase_sum_minus", dm, false, true);
  r.breakdown.add("disorder_I_plus_phase_sum_plus", dp, false, true);
  r.breakdown.add("disorder_wightman_I_plus",
                  quadrature::scaled(quadrature::product(sm, dp) + quadrature::product(sp, dm), c),
                  true, true);
}

}  // namespace

ScenarioResult scenario2_free(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::PsiF, false);
  r.breakdown = scenario1_free(p, opt).breakdown;
  const Scaled z = scale(p);
  const double c = coupling4(p);
  add_wightman_pair(r, z, c, opt);
  add_r_independent_pair(r, z, c, opt);
  finish(r, false);
  return r;
}

ScenarioResult scenario2_disorder(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::PsiF, true);
  r.breakdown = scenario1_disorder(p, opt).breakdown;
  const Scaled z = scale(p);
  const double c = coupling4(p);
  add_wightman_pair(r, z, c, opt);
  add_r_independent_pair(r, z, c, opt);
  add_disorder_wightman_pair(r, z, c, opt);
  finish(r, false);
  return r;
}

namespace {

void add_single_atom_terms(ScenarioResult& r, const Scaled& z, double c, const EngineOptions& opt) {
  if (!opt.include_r_independent) return;
  const double l2 = r.params.lambda * r.params.lambda;
  const auto P = quadrature::weighted_xi_integral(wightman_r0_kernel(opt.reg), 1.0, z.D, opt.spec);
  r.breakdown.add("single_atom_vacuum", real_part(quadrature::scaled(P, l2 / 4.0)), false);
  r.breakdown.add("deltaP_r0_groups", deltaP_r0(z, c, opt), false);
}

}  // namespace

ScenarioResult scenario3_free(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::BigPhiF, false);
  r.breakdown = scenario2_free(p, opt).breakdown;
  const Scaled z = scale(p);
  const double c = coupling4(p);
  add_free_groups(r, z, c, opt);
  add_single_atom_terms(r, z, c, opt);
  finish(r, true);
  return r;
}

ScenarioResult scenario3_disorder(const SystemParams& p, const EngineOptions& opt) {
  ScenarioResult r = start(p, opt, Scenario::BigPhiF, true);
  r.breakdown = scenario2_disorder(p, opt).breakdown;
  const Scaled z = scale(p);
  const double c = coupling4(p);
  add_free_groups(r, z, c, opt);
  add_disorder_groups(r, z, c, opt);
  add_single_atom_terms(r, z, c, opt);
  finish(r, true);
  return r;
}

namespace {

ScenarioResult run(Scenario s, bool disorder, const SystemParams& p, const EngineOptions& opt) {
  switch (s) {
    case Scenario::PhiF:
      return disorder ? scenario1_disorder(p, opt) : scenario1_free(p, opt);
    case Scenario::PsiF:
      return disorder ? scenario2_disorder(p, opt) : scenario2_free(p, opt);
    case Scenario::BigPhiF:
      return disorder ? scenario3_disorder(p, opt) : scenario3_free(p, opt);
  }
  throw std::invalid_argument("unknown scenario");
}

}  // namespace

ScenarioResult evaluate(Scenario s, const SystemParams& p, const EngineOptions& opt) {
  return run(s, p.sigma2 > 0.0, p, opt);
}

double suppression_exponent(double omega0_dtau, const std::vector<double>& grid,
                            const quadrature::QuadratureSpec& spec) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (double y : grid) {
    if (!(y > omega0_dtau)) continue;
    SystemParams q;
    q.omega0 = 1.0;
    q.r = y;
    q.tau0 = 0.0;
    q.tau = omega0_dtau;
    const auto a = amplitude_free_A(q, spec);
    lx.push_back(std::log(y));
    ly.push_back(std::log(std::norm(a.total.value)));
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CausalityDiagnostics causality_diagnostics(const ScenarioResult& result, const EngineOptions& opt,
                                           std::vector<double> grid) {
  if (result.regime != Regime::Precursor) {
    throw std::domain_error("causality_diagnostics: requires dtau < r");
  }
  const SystemParams& p = result.params;
  CausalityDiagnostics d;
  d.precursor_probability = result.probability_r_dependent;
  d.mirrored_dtau = 2.0 * p.r - p.dtau();
  SystemParams m = p;
  m.tau = p.tau0 + d.mirrored_dtau;
  EngineOptions mopt = opt;
  mopt.include_r_independent = false;
  const ScenarioResult mirrored = run(result.scenario, result.with_disorder, m, mopt);
  d.mirrored_probability = mirrored.probability_r_dependent;
  d.precursor_ratio = std::abs(d.precursor_probability.value) / std::abs(d.mirrored_probability.value);
  d.exponent_grid = std::move(grid);
  d.suppression_exponent = suppression_exponent(p.omega0 * p.dtau(), d.exponent_grid, opt.spec);
  d.free_residual = result.breakdown.free_total();
  d.disorder_residual = result.breakdown.total();
  d.regulated = mirrored.regulated;
  return d;
}

Crossover find_crossover_radius(double omega0, double sigma2, double dtau, const EngineOptions& opt,
                                double r_max_factor) {
  opt.validate();
  if (!(omega0 > 0.0) || !(dtau > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("find_crossover_radius: omega0, sigma2, dtau must be > 0");
  }
  const auto gap = [&](double r) {
    SystemParams p;
    p.omega0 = omega0;
    p.r = r;
    p.tau0 = 0.0;
    p.tau = dtau;
    p.sigma2 = sigma2;
    const double a = std::abs(amplitude_free_A(p, opt.spec).total.value);
    const double i = std::abs(disorder_amplitude(p, opt).value);
    return std::log(i) - std::log(a);
  };
  constexpr int n = 160;
  const double lo = dtau * 1.01;
  const double hi = dtau * r_max_factor;
  std::vector<double> rs(n);
  std::vector<double> fs(n);
  for (int k = 0; k < n; ++k) {
    rs[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    fs[k] = gap(rs[k]);
  }
  for (int k = n - 2; k >= 0; --k) {
    if (fs[k] > 0.0 && fs[k + 1] <= 0.0) {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          gap, rs[k], rs[k + 1], fs[k], fs[k + 1], boost::math::tools::eps_tolerance<double>(45),
          iters);
      return {0.5 * (a + b), true};
    }
  }
  return {std::numeric_limits<double>::quiet_NaN(), false};
}

}  // namespace fermi::scenarios
