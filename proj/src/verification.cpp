#include "fermi/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fermi/asymptotics.hpp"
#include "fermi/greens.hpp"
#include "fermi/quadrature.hpp"

namespace fermi::verification {

using scenarios::EngineOptions;
using scenarios::SystemParams;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SystemParams point(double omega0, double r, double dtau, double sigma2 = 0.0) {
  SystemParams p;
  p.omega0 = omega0;
  p.r = r;
  p.tau0 = 0.0;
  p.tau = dtau;
  p.sigma2 = sigma2;
  p.lambda = 1.0;
  return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// ---- A1 -------------------------------------------------------------------

Criterion a1(const EngineOptions& opt) {
  Criterion c{"A1", "reduced scenario-1 route equals 4D direct integration (eps=1e-2)"};
  c.tolerance = 1e-6;
  c.comparison = "max relative deviation <=";
  greens::Regularization reg;
  reg.eps = 1e-2;
  const double pairs[3][2] = {{2.0, 1.0}, {5.0, 1.0}, {5.0, 2.0}};
  std::ostringstream os;
  double worst = 0.0;
  for (const auto& pr : pairs) {
    const double r = pr[0];
    const double dtau = pr[1];
    const auto G = [&](double x) { return greens::feynman_free_ieps({x, r}, reg); };
    quadrature::Kernel k;
    k.smooth = G;
    k.breakpoints = {-r, r};
    const auto A = quadrature::weighted_xi_integral(k, 1.0, dtau, opt.spec);
    const double reduced = std::norm(A.value) / 16.0;
    const quadrature::Integrand4 f = [&](const std::array<double, 4>& t) {
      const cplx a = std::polar(1.0, -(t[0] - t[1])) * G(t[0] - t[1]);
      const cplx b = std::polar(1.0, -(t[2] - t[3])) * G(t[2] - t[3]);
      return a * std::conj(b) / 16.0;
    };
    const auto direct = quadrature::direct_quadruple_integral(f, 0.0, dtau, opt.spec);
    const double d = std::abs(direct.value - reduced) / reduced;
    worst = std::max(worst, d);
    os << "(r=" << r << ",dtau=" << dtau << ") reduced=" << fmt("%.12e", reduced)
       << " direct=" << fmt("%.12e", direct.value.real()) << " rel=" << fmt("%.2e", d) << "; ";
  }
  c.measured = worst;
  c.passed = worst <= c.tolerance;
  c.detail = os.str();
  return c;
}

// ---- A2 -------------------------------------------------------------------

Criterion a2(const EngineOptions& opt) {
  Criterion c{"A2", "light-cone delta onset: 0 below, analytic sifting value above"};
  c.tolerance = 1e-10;
  c.comparison = "exact zero below; relative deviation above <=";
  std::ostringstream os;
  double worst = 0.0;
  bool zero_below = true;
  for (double r : {2.0, 5.0, 10.0}) {
    const auto below = scenarios::amplitude_free_A(point(1.0, r, r * (1.0 - 1e-3)), opt.spec);
    const auto bp = scenarios::scenario1_free(point(1.0, r, r * (1.0 - 1e-3)), opt);
    const bool z = below.delta.value == cplx{} &&
                   bp.breakdown.find("free_delta_part")->value.value == cplx{};
    zero_below = zero_below && z;
    const double dtau = r * (1.0 + 1e-3);
    const auto above = scenarios::amplitude_free_A(point(1.0, r, dtau), opt.spec);
    const cplx expect = -(dtau - r) * std::cos(r) / (4.0 * pi * r);
    const double d = rel(above.delta.value, expect);
    worst = std::max(worst, d);
    os << "r=" << r << " below=" << (z ? "0" : "nonzero") << " above="
       << fmt("%.15e", above.delta.value.real()) << " expect=" << fmt("%.15e", expect.real())
       << "; ";
  }
  c.measured = worst;
  c.passed = zero_below && worst <= c.tolerance;
  c.detail = os.str();
  return c;
}

// ---- A3 -------------------------------------------------------------------

Criterion a3(const EngineOptions& opt) {
  Criterion c{"A3", "wave-zone disorder amplitude vs -i pi sigma2 w^3 sin(w dtau)/(2pi)^4"};
  c.tolerance = 0.02;
  c.comparison = "max relative deviation <=";
  std::ostringstream os;
  double worst = 0.0;
  for (double dtau : {1.0, 2.0, 5.0}) {
    const auto I = scenarios::disorder_amplitude(point(1.0, 100.0, dtau, 1.0), opt);
    const cplx target = asymptotics::wave_zone_disorder(1.0, 1.0, dtau);
    const cplx far = asymptotics::disorder_far_field(1.0, 1.0, 100.0, dtau);
    const double d = rel(I.value, target);
    worst = std::max(worst, d);
    os << "dtau=" << dtau << " numeric=" << fmt("%.6e", I.value.imag()) << "i target="
       << fmt("%.6e", target.imag()) << "i ratio=" << fmt("%.3e", I.value.imag() / target.imag())
       << " r^-6 form=" << fmt("%.6e", far.imag()) << "i; ";
  }
  c.measured = worst;
  c.passed = worst <= c.tolerance;
  c.detail = os.str();
  return c;
}

// ---- A4 / A5 -----------------------------------------------------------------

struct ResidualPoint {
  double omega0, r, dtau;
};

constexpr ResidualPoint a4_points[] = {{1.0, 3.0, 1.5}, {1.0, 5.0, 2.5}, {2.0, 4.0, 1.0}};

Criterion a4(const EngineOptions& opt) {
  Criterion c{"A4", "free inclusive (scenario 3) noncausal residual cancels"};
  c.tolerance = 1e-8;
  c.comparison = "max |residual| / largest term <=";
  std::ostringstream os;
  double worst = 0.0;
  for (const auto& q : a4_points) {
    const auto res = scenarios::scenario3_free(point(q.omega0, q.r, q.dtau), opt);
    const double d = std::abs(res.probability_r_dependent.value) / res.largest_term;
    worst = std::max(worst, d);
    os << "(w=" << q.omega0 << ",r=" << q.r << ",dtau=" << q.dtau
       << ") residual=" << fmt("%.3e", std::abs(res.probability_r_dependent.value))
       << " largest=" << fmt("%.3e", res.largest_term) << " rel=" << fmt("%.2e", d) << "; ";
  }
  c.measured = worst;
  c.passed = worst <= c.tolerance;
  c.detail = os.str();
  return c;
}

Criterion a5(const EngineOptions& opt) {
  Criterion c{"A5", "disorder residual exceeds 10x the free residual (w=1, r=3, dtau=1.5, s2=0.1)"};
  c.tolerance = 10.0;
  c.comparison = "|disorder residual| / |free residual| >";
  const auto p = point(1.0, 3.0, 1.5, 0.1);
  const auto fr = scenarios::scenario3_free(p, opt);
  const auto dr = scenarios::scenario3_disorder(p, opt);
  const double f = std::abs(fr.probability_r_dependent.value);
  const double d = std::abs(dr.probability_r_dependent.value);
  c.measured = f > 0.0 ? d / f : std::numeric_limits<double>::infinity();
  c.passed = d > 10.0 * f && d > 0.0;
  c.detail = "disorder residual=" + fmt("%.6e", dr.probability_r_dependent.value.real()) +
             " free residual=" + fmt("%.3e", f) + " (lambda=1)";
  return c;
}

// ---- A6 -------------------------------------------------------------------

Criterion a6(const EngineOptions& opt) {
  Criterion c{"A6", "precursor |A|^2 exponent vs w r over {30,100,300} at w dtau = 1"};
  c.tolerance = 0.3;
  c.comparison = "|slope + 4| <=";
  const double s = scenarios::suppression_exponent(1.0, {30.0, 100.0, 300.0}, opt.spec);
  c.measured = s;
  c.passed = std::abs(s + 4.0) <= c.tolerance;
  c.detail = "slope=" + fmt("%.6f", s);
  return c;
}

// ---- A7 -------------------------------------------------------------------

Criterion a7(const EngineOptions& opt) {
  Criterion c{"A7", "crossover radius |I| = |A| vs sigma2 over one decade (w=1, dtau=1)"};
  c.tolerance = 0.1;
  c.comparison = "|slope - 1| <=";
  std::vector<double> lx;
  std::vector<double> ly;
  std::ostringstream os;
  bool all_found = true;
  for (int k = 0; k < 5; ++k) {
    const double s2 = 10.0 * std::pow(10.0, k / 4.0);
    const auto x = scenarios::find_crossover_radius(1.0, s2, 1.0, opt);
    all_found = all_found && x.found;
    os << "s2=" << fmt("%.4g", s2) << " r0=" << fmt("%.6f", x.r0) << "; ";
    if (x.found) {
      lx.push_back(std::log(s2));
      ly.push_back(std::log(x.r0));
    }
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  c.measured = slope;
  c.passed = all_found && std::abs(slope - 1.0) <= c.tolerance;
  os << "slope=" << fmt("%.4f", slope);
  c.detail = os.str();
  return c;
}

// ---- A8 -------------------------------------------------------------------

Criterion a8(const EngineOptions& opt) {
  Criterion c{"A8", "kernel invariants on a 100-point randomized grid (seed 20240917)"};
  c.tolerance = 1e-8;
  c.comparison = "split-vs-ieps relative deviation <=";
  opt.validate();
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const greens::Regularization& sched = opt.reg;

  int bad_even = 0, bad_herm = 0, bad_I_even = 0, bad_imag = 0, bad_lin = 0;
  double worst_imag = 0.0, worst_lin = 0.0, worst_sp = 0.0;
  for (int n = 0; n < 100; ++n) {
    // Symmetry checks anywhere, light cone included in the range.
    const double r = 0.5 + 4.5 * U(rng);
    const double dt = -6.0 + 12.0 * U(rng);
    greens::Regularization reg;
    reg.eps = std::pow(10.0, -4.0 + 2.0 * U(rng));
    const greens::DisorderModel dm{0.1 + 2.0 * U(rng)};
    if (greens::feynman_free_ieps({dt, r}, reg) != greens::feynman_free_ieps({-dt, r}, reg)) ++bad_even;
    if (greens::wightman_free({-dt, r}, reg) != std::conj(greens::wightman_free({dt, r}, reg))) ++bad_herm;
    if (greens::disorder_I({dt, r}, reg, dm) != greens::disorder_I({-dt, r}, reg, dm)) ++bad_I_even;

    const greens::DisorderModel dm2{2.0 * dm.sigma2};
    const cplx i1 = greens::disorder_I({dt, r}, reg, dm);
    const cplx i2 = greens::disorder_I({dt, r}, reg, dm2);
    const cplx p1 = greens::disorder_I_plus({dt, r}, reg, dm);
    const cplx p2 = greens::disorder_I_plus({dt, r}, reg, dm2);
    const double lin = std::max(std::abs(i2 - 2.0 * i1) / std::max(std::abs(i1), 1e-300),
                                std::abs(p2 - 2.0 * p1) / std::max(std::abs(p1), 1e-300));
    worst_lin = std::max(worst_lin, lin);
    if (lin > 1e-14) ++bad_lin;

    // Spacelike purity: r in [2, 10], |dt| < r/2, extrapolated over the schedule.
    const double rs = 2.0 + 8.0 * U(rng);
    const double ds = (-0.5 + U(rng)) * rs;
    const auto ex = quadrature::eps_extrapolate(
        [&](double eps) {
          greens::Regularization g;
          g.eps = eps;
          return greens::disorder_I({ds, rs}, g, dm);
        },
        sched);
    const double im = std::abs(ex.value.real()) / std::abs(ex.value.imag());
    worst_imag = std::max(worst_imag, im);
    if (im >= 1e-10) ++bad_imag;

    // Sokhotski-Plemelj: eps-extrapolated ieps window integral vs split form.
    const double rr = 1.5 + 3.5 * U(rng);
    const double f = U(rng);
    const double dtau = rr * (f < 0.5 ? 0.2 + 0.8 * f : 1.4 + 2.2 * (f - 0.5));
    const double w = 0.5 + 2.5 * U(rng);
    quadrature::Kernel split;
    split.smooth = [rr](double x) { return cplx{0.0, 1.0 / (4.0 * pi * pi * ((x - rr) * (x + rr)))}; };
    split.pv_poles = {-rr, rr};
    split.deltas = greens::feynman_free_split({0.0, rr}).deltas;
    const auto ref = quadrature::weighted_xi_integral(split, w, dtau, opt.spec);
    const auto ext = quadrature::eps_extrapolate(
        [&](double eps) {
          greens::Regularization g;
          g.eps = eps;
          quadrature::Kernel k;
          k.smooth = [&g, rr](double x) { return greens::feynman_free_ieps({x, rr}, g); };
          k.breakpoints = {-rr, rr};
          return quadrature::weighted_xi_integral(k, w, dtau, opt.spec);
        },
        sched);
    worst_sp = std::max(worst_sp, rel(ext.value, ref.value));
  }
  std::ostringstream os;
  os << "feynman_even_fail=" << bad_even << " wightman_hermitian_fail=" << bad_herm
     << " I_even_fail=" << bad_I_even << " spacelike_imag_fail=" << bad_imag
     << " (max |Re|/|Im|=" << fmt("%.2e", worst_imag) << ") sigma2_linear_fail=" << bad_lin
     << " (max=" << fmt("%.1e", worst_lin) << ") split_vs_ieps_max=" << fmt("%.2e", worst_sp);
  c.measured = worst_sp;
  c.passed = bad_even == 0 && bad_herm == 0 && bad_I_even == 0 && bad_imag == 0 && bad_lin == 0 &&
             worst_sp <= c.tolerance;
  c.detail = os.str();
  return c;
}

using Check = std::function<Criterion(const EngineOptions&)>;

const std::map<std::string, Check>& checks() {
  static const std::map<std::string, Check> m = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},
      {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8},
  };
  return m;
}

const std::map<std::string, std::vector<std::string>>& suites() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"kernels", {"A8"}},
      {"quadrature", {"A1", "A2"}},
      {"causality", {"A4", "A5"}},
      {"wavezone", {"A3", "A6", "A7"}},
      {"all", {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"}},
  };
  return m;
}

}  // namespace

bool Report::all_passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"kernels", "quadrature", "causality", "wavezone",
                                                 "all"};
  return names;
}

bool is_suite(const std::string& name) { return suites().count(name) != 0; }

Criterion run_criterion(const std::string& id, const EngineOptions& opt) {
  const auto it = checks().find(id);
  if (it == checks().end()) throw std::invalid_argument("unknown criterion: " + id);
  opt.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c = it->second(opt);
  c.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

Report run_suite(const std::string& name, const EngineOptions& opt) {
  const auto it = suites().find(name);
  if (it == suites().end()) throw std::invalid_argument("unknown suite: " + name);
  opt.validate();
  Report rep;
  rep.suite = name;
  for (const auto& id : it->second) rep.criteria.push_back(run_criterion(id, opt));
  return rep;
}

std::string format_line(const Criterion& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %s  measured=%.6e  %s %.3g  (%.2fs)", c.id.c_str(),
                c.passed ? "PASS" : "FAIL", c.measured, c.comparison.c_str(), c.tolerance,
                c.runtime_s);
  return std::string(buf) + "  " + c.title + "\n    " + c.detail;
}

}  // namespace fermi::verification
