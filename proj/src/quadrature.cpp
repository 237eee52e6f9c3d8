#include "fermi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fermi::quadrature {

namespace {

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

double tolerance(const QuadratureSpec& spec, cplx value) {
  return std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 21

struct PieceEstimate {
  cplx value;
  double err;
  double floor;  // roundoff floor of err
};

// Integrates f, or f + g when g is given. The roundoff floor uses |f| + |g|,
// so cancelling pairs are not refined below their noise level.
PieceEstimate gk21(const RealFunction& f, const RealFunction* g, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xk = gauss_kronrod<double, 21>::abscissa();
  const auto& wk = gauss_kronrod<double, 21>::weights();
  const auto& wg = gauss<double, 10>::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto eval = [&](double x, double& mag) {
    const cplx u = f(x);
    if (!g) {
      mag = std::abs(u);
      return u;
    }
    const cplx v = (*g)(x);
    mag = std::abs(u) + std::abs(v);
    return u + v;
  };
  std::array<cplx, 21> fv;
  double m0 = 0.0;
  fv[0] = eval(c, m0);
  cplx resk = wk[0] * fv[0];
  cplx resg{};
  double resabs = wk[0] * m0;
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = h * xk[j];
    double m1 = 0.0;
    double m2 = 0.0;
    const cplx f1 = eval(c - dx, m1);
    const cplx f2 = eval(c + dx, m2);
    fv[2 * j - 1] = f1;
    fv[2 * j] = f2;
    resk += wk[j] * (f1 + f2);
    resabs += wk[j] * (m1 + m2);
    if (j % 2 == 1) {
      resg += wg[(j - 1) / 2] * (f1 + f2);
    }
  }
  const cplx mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    resasc += wk[j] * (std::abs(fv[2 * j - 1] - mean) + std::abs(fv[2 * j] - mean));
  }
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  // Abscissae carry an absolute rounding of eps |x|; with steep f this shows
  // up as eps |x| times the variation of f over the nodes.
  double variation = 0.0;
  if (!g) {
    const std::size_t n = xk.size();
    cplx prev = fv[2 * n - 3];
    for (std::size_t j = n - 2; j >= 1; --j) {
      variation += std::abs(fv[2 * j - 1] - prev);
      prev = fv[2 * j - 1];
    }
    variation += std::abs(fv[0] - prev);
    prev = fv[0];
    for (std::size_t j = 1; j < n; ++j) {
      variation += std::abs(fv[2 * j] - prev);
      prev = fv[2 * j];
    }
  }
  const double floor = 4.0 * machine_eps * resabs +
                       machine_eps * std::max(std::abs(a), std::abs(b)) * variation;
  err = std::max(err, floor);
  if (!std::isfinite(err)) {
    err = std::numeric_limits<double>::infinity();
  }
  return {resk * h, err, floor};
}

struct Segment {
  double a;
  double b;
  const RealFunction* f;
  const RealFunction* g = nullptr;  // optional second summand
};

struct Piece {
  double a;
  double b;
  const RealFunction* f;
  const RealFunction* g;
  double root;  // width of the initial segment
  PieceEstimate est;
  std::int64_t order;  // insertion sequence; tie-breaker
};

struct ByError {
  bool operator()(const Piece& x, const Piece& y) const {
    if (x.est.err != y.est.err) return x.est.err < y.est.err;
    return x.order > y.order;
  }
};

IntegralResult adaptive_segments(const std::vector<Segment>& segments,
                                 const QuadratureSpec& spec) {
  IntegralResult out;
  std::priority_queue<Piece, std::vector<Piece>, ByError> queue;
  std::int64_t seq = 0;
  for (const auto& s : segments) {
    if (!(s.b > s.a)) continue;
    queue.push({s.a, s.b, s.f, s.g, s.b - s.a, gk21(*s.f, s.g, s.a, s.b), seq++});
    out.evaluations += 21;
  }
  auto totals = [&queue]() {
    // Deterministic order is restored at the end; this is only the stopping test.
    cplx v{};
    double e = 0.0;
    auto copy = queue;
    while (!copy.empty()) {
      v += copy.top().est.value;
      e += copy.top().est.err;
      copy.pop();
    }
    return std::pair{v, e};
  };

  cplx total{};
  double total_err = 0.0;
  {
    auto t = totals();
    total = t.first;
    total_err = t.second;
  }
  int pieces = static_cast<int>(queue.size());
  while (!queue.empty() && total_err > tolerance(spec, total)) {
    if (pieces >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    Piece worst = queue.top();
    if (worst.est.err <= worst.est.floor * (1.0 + 1e-12)) {
      // Remaining error is roundoff; bisection cannot reduce it.
      break;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a < 1e-9 * worst.root) {
      // Noise below the relative floor (cancelling weights near a pole).
      out.converged = false;
      break;
    }
    queue.pop();
    Piece left{worst.a, mid, worst.f, worst.g, worst.root, gk21(*worst.f, worst.g, worst.a, mid),
               seq++};
    Piece right{mid, worst.b, worst.f, worst.g, worst.root, gk21(*worst.f, worst.g, mid, worst.b),
                seq++};
    out.evaluations += 42;
    total += left.est.value + right.est.value - worst.est.value;
    total_err += left.est.err + right.est.err - worst.est.err;
    queue.push(left);
    queue.push(right);
    ++pieces;
    if (pieces % 256 == 0) {
      auto t = totals();
      total = t.first;
      total_err = t.second;
    }
  }

  std::vector<Piece> all;
  all.reserve(queue.size());
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  // Sum by position for a bit-reproducible result.
  std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.order < y.order;
  });
  for (const auto& p : all) {
    out.value += p.est.value;
    out.err_est += p.est.err;
  }
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag())) {
    out.converged = false;
  }
  return out;
}

void split_uniform(std::vector<Segment>& out, double a, double b, const RealFunction* f,
                   double max_len, const RealFunction* g = nullptr) {
  if (!(b > a)) return;
  int n = 1;
  if (max_len > 0.0 && std::isfinite(max_len)) {
    n = std::max(1, static_cast<int>(std::ceil((b - a) / max_len - 1e-12)));
    n = std::min(n, 100000);
  }
  for (int i = 0; i < n; ++i) {
    const double lo = a + (b - a) * i / n;
    const double hi = (i + 1 == n) ? b : a + (b - a) * (i + 1) / n;
    out.push_back({lo, hi, f, g});
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("quadrature tolerances must be positive");
  }
  if (gauss_nodes < 8) {
    throw std::invalid_argument("gauss_nodes must be >= 8");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("max_subdivisions must be >= 1");
  }
}

IntegralResult& IntegralResult::operator+=(const IntegralResult& o) {
  value += o.value;
  err_est += o.err_est;
  evaluations += o.evaluations;
  converged = converged && o.converged;
  regulated = regulated || o.regulated;
  return *this;
}

IntegralResult operator+(IntegralResult a, const IntegralResult& b) {
  a += b;
  return a;
}

IntegralResult product(const IntegralResult& a, const IntegralResult& b) {
  IntegralResult r;
  r.value = a.value * b.value;
  r.err_est = std::abs(a.value) * b.err_est + std::abs(b.value) * a.err_est + a.err_est * b.err_est +
              4.0 * machine_eps * std::abs(r.value);
  r.evaluations = a.evaluations + b.evaluations;
  r.converged = a.converged && b.converged;
  r.regulated = a.regulated || b.regulated;
  return r;
}

IntegralResult scaled(const IntegralResult& a, cplx factor) {
  IntegralResult r = a;
  r.value *= factor;
  r.err_est *= std::abs(factor);
  for (auto& v : r.raw_sequence) v *= factor;
  return r;
}

IntegralResult conj(const IntegralResult& a) {
  IntegralResult r = a;
  r.value = std::conj(a.value);
  for (auto& v : r.raw_sequence) v = std::conj(v);
  return r;
}

Kernel smooth_kernel(RealFunction f) {
  Kernel k;
  k.smooth = std::move(f);
  return k;
}

IntegralResult adaptive_integrate(const RealFunction& f, double a, double b,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& interior) {
  spec.validate();
  if (a == b) return {};
  double lo = std::min(a, b);
  double hi = std::max(a, b);
  std::vector<double> pts{lo, hi};
  for (double x : interior) {
    if (x > lo && x < hi) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    segs.push_back({pts[i], pts[i + 1], &f});
  }
  IntegralResult r = adaptive_segments(segs, spec);
  if (b < a) r.value = -r.value;
  return r;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// ---------------------------------------------------------------------------
// Window integrals

IntegralResult window_integral(const Kernel& kernel, const RealFunction& weight, double dtau,
                               double oscillation, const QuadratureSpec& spec) {
  spec.validate();
  if (!(dtau > 0.0)) {
    throw std::domain_error("window_integral: dtau must be > 0");
  }
  IntegralResult out;
  out.regulated = kernel.regulated;

  for (const auto& d : kernel.deltas) {
    const double x = std::abs(d.location);
    if (x < dtau) {
      out.value += d.weight * weight(d.location);
    } else if (x == dtau) {
      out.value += 0.5 * d.weight * weight(d.location);
    }
    ++out.evaluations;
  }
  if (!kernel.smooth) {
    return out;
  }

  const RealFunction integrand = [&](double x) { return weight(x) * kernel.smooth(x); };

  std::vector<double> marks{-dtau, 0.0, dtau};
  for (double b : kernel.breakpoints) {
    if (b > -dtau && b < dtau) marks.push_back(b);
  }
  std::vector<double> poles;
  for (double p : kernel.pv_poles) {
    if (p > -dtau && p < dtau) poles.push_back(p);
  }
  std::sort(poles.begin(), poles.end());
  poles.erase(std::unique(poles.begin(), poles.end()), poles.end());

  // Pair windows reach the window edge or halfway to the next pole. Marks
  // inside a window become cuts in the pair offset.
  std::vector<double> halfwidth(poles.size());
  for (std::size_t i = 0; i < poles.size(); ++i) {
    double h = std::min(dtau - poles[i], poles[i] + dtau);
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (j != i) h = std::min(h, 0.5 * std::abs(poles[j] - poles[i]));
    }
    halfwidth[i] = h;
  }
  auto inside_window = [&](double x) {
    for (std::size_t k = 0; k < poles.size(); ++k) {
      if (x > poles[k] - halfwidth[k] && x < poles[k] + halfwidth[k]) return true;
    }
    return false;
  };

  // Symmetric pairs g(p + t) + g(p - t) on (0, h]: the 1/t parts cancel.
  std::vector<RealFunction> pair_fns;
  pair_fns.reserve(2 * poles.size());
  // Both points use an offset representable on either side of p, so the pair
  // is exactly symmetric about p.
  const auto offset = [](double p, double t) {
    const double d = (p + t) - p;
    return p - (p - d);
  };
  for (double p : poles) {
    pair_fns.emplace_back([&integrand, &offset, p](double t) {
      const double d = offset(p, t);
      return d > 0.0 ? integrand(p + d) : cplx{};
    });
    pair_fns.emplace_back([&integrand, &offset, p](double t) {
      const double d = offset(p, t);
      return d > 0.0 ? integrand(p - d) : cplx{};
    });
  }

  std::vector<double> cuts;
  for (double m : marks) {
    if (!inside_window(m)) cuts.push_back(m);
  }
  for (std::size_t i = 0; i < poles.size(); ++i) {
    cuts.push_back(poles[i] - halfwidth[i]);
    cuts.push_back(poles[i] + halfwidth[i]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double max_len =
      oscillation > 0.0 ? std::numbers::pi / oscillation : std::numeric_limits<double>::infinity();
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!inside_window(0.5 * (a + b))) split_uniform(segs, a, b, &integrand, max_len);
  }
  for (std::size_t k = 0; k < poles.size(); ++k) {
    std::vector<double> tcuts{0.0, halfwidth[k]};
    for (double m : marks) {
      const double t = std::abs(m - poles[k]);
      if (t > 0.0 && t < halfwidth[k]) tcuts.push_back(t);
    }
    std::sort(tcuts.begin(), tcuts.end());
    tcuts.erase(std::unique(tcuts.begin(), tcuts.end()), tcuts.end());
    for (std::size_t i = 0; i + 1 < tcuts.size(); ++i) {
      split_uniform(segs, tcuts[i], tcuts[i + 1], &pair_fns[2 * k], max_len,
                    &pair_fns[2 * k + 1]);
    }
  }

  IntegralResult smooth = adaptive_segments(segs, spec);
  out.value += smooth.value;
  out.err_est += smooth.err_est;
  out.evaluations += smooth.evaluations;
  out.converged = smooth.converged;
  return out;
}

IntegralResult weighted_xi_integral(const Kernel& kernel, double omega0, double dtau,
                                    const QuadratureSpec& spec) {
  const RealFunction weight = [omega0, dtau](double x) {
    return (dtau - std::abs(x)) * std::polar(1.0, -omega0 * x);
  };
  return window_integral(kernel, weight, dtau, std::abs(omega0), spec);
}

IntegralResult phase_sum_integral(const Kernel& kernel, double omega0, double tau0, double tau,
                                  int sign, const QuadratureSpec& spec) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("phase_sum_integral: sign must be +1 or -1");
  }
  if (!(tau > tau0)) {
    throw std::domain_error("phase_sum_integral: requires tau > tau0");
  }
  const double dtau = tau - tau0;
  const cplx centre = std::polar(1.0, sign * omega0 * (tau0 + tau));
  // E(xi) = e^{s i w (tau0 + tau)} sin(w l)/w,  l = dtau - |xi|
  const RealFunction weight = [=](double x) {
    const double l = dtau - std::abs(x);
    const double wl = omega0 * l;
    const double s = std::abs(wl) < 1e-8 ? l * (1.0 - wl * wl / 6.0) : std::sin(wl) / omega0;
    return centre * s;
  };
  return window_integral(kernel, weight, dtau, std::abs(omega0), spec);
}

// ---------------------------------------------------------------------------
// Ordered 4D integrals

namespace {

bool ordering_compatible(const std::array<int, 4>& rank, const std::vector<TimeOrder>& cons) {
  for (const auto& c : cons) {
    if (rank[c.later - 1] <= rank[c.earlier - 1]) return false;
  }
  return true;
}

void check_labels(const std::vector<TimeOrder>& cons) {
  for (const auto& c : cons) {
    if (c.later < 1 || c.later > 4 || c.earlier < 1 || c.earlier > 4) {
      throw std::invalid_argument("TimeOrder labels must be in 1..4");
    }
  }
}

struct UnitRule {
  std::vector<double> x;
  std::vector<double> w;
};

UnitRule composite_unit(int n, int panels) {
  const GaussRule g = gauss_legendre(n);
  UnitRule r;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double h = 0.5 / panels;
    for (int i = 0; i < n; ++i) {
      r.x.push_back(a + h * (g.nodes[i] + 1.0));
      r.w.push_back(h * g.weights[i]);
    }
  }
  return r;
}

// Integral over tau0 <= s1 < s2 < s3 < s4 <= tau0 + T with tau[perm[k]] = s_{k+1}.
cplx simplex_rule(const Integrand4& f, const std::array<int, 4>& perm, double tau0, double T,
                  const UnitRule& u, std::int64_t& evals, double& abs_sum) {
  cplx sum{};
  double mag = 0.0;
  std::array<double, 4> tau{};
  const std::size_t n = u.x.size();
  for (std::size_t i4 = 0; i4 < n; ++i4) {
    const double s4 = T * u.x[i4];
    cplx sum3{};
    double mag3 = 0.0;
    for (std::size_t i3 = 0; i3 < n; ++i3) {
      const double s3 = s4 * u.x[i3];
      cplx sum2{};
      double mag2 = 0.0;
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        const double s2 = s3 * u.x[i2];
        cplx sum1{};
        double mag1 = 0.0;
        for (std::size_t i1 = 0; i1 < n; ++i1) {
          const double s1 = s2 * u.x[i1];
          tau[perm[0]] = tau0 + s1;
          tau[perm[1]] = tau0 + s2;
          tau[perm[2]] = tau0 + s3;
          tau[perm[3]] = tau0 + s4;
          const cplx v = f(tau);
          sum1 += u.w[i1] * v;
          mag1 += u.w[i1] * std::abs(v);
        }
        sum2 += u.w[i2] * s2 * sum1;
        mag2 += u.w[i2] * s2 * mag1;
      }
      sum3 += u.w[i3] * s3 * sum2;
      mag3 += u.w[i3] * s3 * mag2;
    }
    sum += u.w[i4] * s4 * sum3;
    mag += u.w[i4] * s4 * mag3;
  }
  evals += static_cast<std::int64_t>(n * n * n * n);
  abs_sum += T * mag;
  return T * sum;
}

}  // namespace

int compatible_orderings(const std::vector<TimeOrder>& constraints) {
  check_labels(constraints);
  std::array<int, 4> perm{0, 1, 2, 3};
  int count = 0;
  do {
    std::array<int, 4> rank{};
    for (int k = 0; k < 4; ++k) rank[perm[k]] = k;
    if (ordering_compatible(rank, constraints)) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

IntegralResult ordered_integral_4d(const Integrand4& integrand,
                                   const std::vector<TimeOrder>& constraints, double tau0,
                                   double tau, const QuadratureSpec& spec) {
  spec.validate();
  check_labels(constraints);
  if (!(tau > tau0)) {
    throw std::domain_error("ordered_integral_4d: requires tau > tau0");
  }
  std::vector<std::array<int, 4>> simplices;
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    std::array<int, 4> rank{};
    for (int k = 0; k < 4; ++k) rank[perm[k]] = k;
    if (ordering_compatible(rank, constraints)) simplices.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  IntegralResult out;
  if (simplices.empty()) {
    return out;  // empty region: exact zero
  }
  const double T = tau - tau0;
  const int n = spec.gauss_nodes;
  for (int panels = 1;; panels *= 2) {
    const UnitRule hi = composite_unit(n, panels);
    const UnitRule lo = composite_unit(n - 2, panels);
    cplx vhi{};
    cplx vlo{};
    double mag = 0.0;
    double unused = 0.0;
    for (const auto& p : simplices) {
      vhi += simplex_rule(integrand, p, tau0, T, hi, out.evaluations, mag);
      vlo += simplex_rule(integrand, p, tau0, T, lo, out.evaluations, unused);
    }
    out.value = vhi;
    out.err_est = std::max(std::abs(vhi - vlo), 16.0 * machine_eps * mag);
    const bool ok = out.err_est <= tolerance(spec, vhi) ||
                    out.err_est <= 16.0 * machine_eps * mag * (1.0 + 1e-12);
    // Next level costs simplices * (2 n P)^4 evaluations.
    const double next = static_cast<double>(simplices.size()) * std::pow(2.0 * n * panels, 4);
    const bool budget = next > static_cast<double>(spec.max_subdivisions) * 1e4;
    if (ok || budget) {
      out.converged = ok;
      break;
    }
  }
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag())) {
    out.converged = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair-product integrals

namespace {

// c0 + cx xi + cy eta
struct Affine {
  double c0 = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Affine operator-(const Affine& o) const { return {c0 - o.c0, cx - o.cx, cy - o.cy}; }
};

// Times as t_k = base_k + off_k with base u (first pair) or v (second pair),
// offset xi on the first label of a pair, eta on the first label of the second.
struct PairLayout {
  std::array<int, 4> base{};    // 0 = u, 1 = v
  std::array<Affine, 4> off{};  // offset of t_k
  double alpha = 0.0;           // coefficient of w = u - v in the phase
  double c_xi = 0.0;
  double c_eta = 0.0;
};

PairLayout make_layout(LabelPair first, LabelPair second, const std::array<double, 4>& phase) {
  const std::array<int, 4> labels{first.a, first.b, second.a, second.b};
  std::array<int, 4> seen{};
  for (int l : labels) {
    if (l < 1 || l > 4) throw std::invalid_argument("pair_product_integral: labels must be in 1..4");
    ++seen[l - 1];
  }
  for (int n : seen) {
    if (n != 1) throw std::invalid_argument("pair_product_integral: pairs must cover 1..4 once");
  }
  double sum = 0.0;
  double mag = 0.0;
  for (double c : phase) {
    sum += c;
    mag += std::abs(c);
  }
  if (std::abs(sum) > 1e-12 * std::max(mag, 1.0)) {
    throw std::invalid_argument("pair_product_integral: phase coefficients must sum to zero");
  }
  PairLayout L;
  L.base[first.a - 1] = 0;
  L.base[first.b - 1] = 0;
  L.base[second.a - 1] = 1;
  L.base[second.b - 1] = 1;
  L.off[first.a - 1] = {0.0, 1.0, 0.0};
  L.off[second.a - 1] = {0.0, 0.0, 1.0};
  L.alpha = phase[first.a - 1] + phase[first.b - 1];
  L.c_xi = phase[first.a - 1];
  L.c_eta = phase[second.a - 1];
  return L;
}

double eval(const Affine& f, double xi, double eta) { return f.c0 + f.cx * xi + f.cy * eta; }

struct Bound {
  Affine value;
  bool upper;  // u - v < value, otherwise u - v > value
};

struct SignCondition {
  Affine value;  // must be > 0
};

struct Split {
  std::vector<Bound> bounds;
  std::vector<SignCondition> signs;
};

Split split_constraints(const PairLayout& L, const std::vector<TimeOrder>& cons) {
  Split s;
  for (const auto& c : cons) {
    const int i = c.later - 1;
    const int j = c.earlier - 1;
    if (L.base[i] == L.base[j]) {
      s.signs.push_back({L.off[i] - L.off[j]});
    } else if (L.base[i] == 0) {
      s.bounds.push_back({L.off[j] - L.off[i], false});  // u - v > off_j - off_i
    } else {
      s.bounds.push_back({L.off[i] - L.off[j], true});  // u - v < off_i - off_j
    }
  }
  return s;
}

// int_{w0}^{w1} (m w + c) e^{i alpha w} dw
cplx linear_exp(double m, double c, double alpha, double w0, double w1) {
  if (!(w1 > w0)) return {};
  if (std::abs(alpha) * (w1 - w0) < 0.5) {
    static const GaussRule g = gauss_legendre(10);
    const double h = 0.5 * (w1 - w0);
    const double mid = 0.5 * (w1 + w0);
    cplx s{};
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double w = mid + h * g.nodes[k];
      s += g.weights[k] * (m * w + c) * std::polar(1.0, alpha * w);
    }
    return h * s;
  }
  const cplx ia{0.0, alpha};
  auto F = [&](double w) { return std::polar(1.0, alpha * w) * ((m * w + c) / ia + m / (alpha * alpha)); };
  return F(w1) - F(w0);
}

// The integrand with both kernels stripped, at fixed kernel arguments.
cplx window_weight(const PairLayout& L, const Split& S, double a, double b, double xi, double eta) {
  for (const auto& sc : S.signs) {
    if (!(eval(sc.value, xi, eta) > 0.0)) return {};
  }
  const double u1 = a + std::max(0.0, -xi);
  const double u2 = b - std::max(0.0, xi);
  const double v1 = a + std::max(0.0, -eta);
  const double v2 = b - std::max(0.0, eta);
  if (!(u2 > u1) || !(v2 > v1)) return {};
  double lo = u1 - v2;
  double hi = u2 - v1;
  for (const auto& bd : S.bounds) {
    const double k = eval(bd.value, xi, eta);
    if (bd.upper) {
      hi = std::min(hi, k);
    } else {
      lo = std::max(lo, k);
    }
  }
  if (!(hi > lo)) return {};
  // Length in v of {v1 <= v <= v2, u1 <= v + w <= u2}: a trapezoid in w.
  const double b0 = u1 - v2;
  const double b1 = std::min(u1 - v1, u2 - v2);
  const double b2 = std::max(u1 - v1, u2 - v2);
  const double b3 = u2 - v1;
  const double top = std::min(u2 - u1, v2 - v1);
  const double al = L.alpha;
  cplx s = linear_exp(1.0, -b0, al, std::max(lo, b0), std::min(hi, b1));
  s += linear_exp(0.0, top, al, std::max(lo, b1), std::min(hi, b2));
  s += linear_exp(-1.0, b3, al, std::max(lo, b2), std::min(hi, b3));
  return std::polar(1.0, L.c_xi * xi + L.c_eta * eta) * s;
}

// Piecewise-affine ingredients of window_weight in the quadrant (sx, sy).
std::vector<Affine> kink_lines(const Split& S, double a, double b, int sx, int sy) {
  const Affine u1{a, sx < 0 ? -1.0 : 0.0, 0.0};
  const Affine u2{b, sx > 0 ? -1.0 : 0.0, 0.0};
  const Affine v1{a, 0.0, sy < 0 ? -1.0 : 0.0};
  const Affine v2{b, 0.0, sy > 0 ? -1.0 : 0.0};
  std::vector<Affine> forms{u1 - v2, u1 - v1, u2 - v2, u2 - v1, u2 - u1, v2 - v1};
  for (const auto& bd : S.bounds) forms.push_back(bd.value);
  std::vector<Affine> lines;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      const Affine d = forms[i] - forms[j];
      if (d.cx != 0.0 || d.cy != 0.0) lines.push_back(d);
    }
  }
  for (const auto& sc : S.signs) lines.push_back(sc.value);
  return lines;
}

bool in_side(double x, int s) { return s > 0 ? x >= 0.0 : x <= 0.0; }

void push_unique(std::vector<double>& v, double x, double D) {
  if (!(x > -D && x < D) || !std::isfinite(x)) return;
  v.push_back(x);
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<double> special_points(const Kernel& k) {
  std::vector<double> p = k.pv_poles;
  for (const auto& d : k.deltas) p.push_back(d.location);
  for (double x : k.breakpoints) p.push_back(x);
  return p;
}

}  // namespace

IntegralResult pair_product_integral(const Kernel& k1, LabelPair first, const Kernel& k2,
                                     LabelPair second, const std::array<double, 4>& phase,
                                     const std::vector<TimeOrder>& constraints, double tau0,
                                     double tau, const QuadratureSpec& spec) {
  spec.validate();
  check_labels(constraints);
  if (!(tau > tau0)) {
    throw std::domain_error("pair_product_integral: requires tau > tau0");
  }
  const PairLayout L = make_layout(first, second, phase);
  IntegralResult out;
  out.regulated = k1.regulated || k2.regulated;
  if (compatible_orderings(constraints) == 0) return out;

  const Split S = split_constraints(L, constraints);
  const double D = tau - tau0;
  double cmax = std::abs(L.alpha);
  for (double c : phase) cmax = std::max(cmax, std::abs(c));
  const double osc = 2.0 * cmax;

  std::array<std::vector<Affine>, 4> lines;
  const int sides[2] = {-1, 1};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) lines[2 * i + j] = kink_lines(S, tau0, tau, sides[i], sides[j]);
  }

  // Outer breakpoints: kink lines meeting the special rows of the inner integral,
  // each other, or running parallel to the inner axis.
  std::vector<double> rows = special_points(k2);
  rows.insert(rows.end(), {0.0, -D, D});
  Kernel outer = k1;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto& ls = lines[2 * i + j];
      for (const auto& l : ls) {
        if (l.cx == 0.0) continue;
        for (double eta : rows) {
          if (!in_side(eta, sides[j])) continue;
          const double x = -(l.c0 + l.cy * eta) / l.cx;
          if (in_side(x, sides[i])) push_unique(outer.breakpoints, x, D);
        }
      }
      for (std::size_t p = 0; p < ls.size(); ++p) {
        for (std::size_t q = p + 1; q < ls.size(); ++q) {
          const double det = ls[p].cx * ls[q].cy - ls[q].cx * ls[p].cy;
          if (det == 0.0) continue;
          const double x = (-ls[p].c0 * ls[q].cy + ls[q].c0 * ls[p].cy) / det;
          const double e = (-ls[p].cx * ls[q].c0 + ls[q].cx * ls[p].c0) / det;
          if (in_side(x, sides[i]) && in_side(e, sides[j])) push_unique(outer.breakpoints, x, D);
        }
      }
    }
  }
  for (double x : special_points(k2)) push_unique(outer.breakpoints, x, D);
  sort_unique(outer.breakpoints);

  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = 0.1 * spec.rel_tol;
  inner_spec.abs_tol = 0.1 * spec.abs_tol;
  bool inner_ok = true;
  double inner_err = 0.0;
  double inner_mag = 0.0;
  std::int64_t inner_evals = 0;

  const RealFunction H = [&](double xi) {
    Kernel inner = k2;
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        if (!in_side(xi, sides[i])) continue;
        for (const auto& l : lines[2 * i + j]) {
          if (l.cy == 0.0) continue;
          const double e = -(l.c0 + l.cx * xi) / l.cy;
          if (in_side(e, sides[j])) push_unique(inner.breakpoints, e, D);
        }
      }
    }
    sort_unique(inner.breakpoints);
    const RealFunction w = [&](double eta) { return window_weight(L, S, tau0, tau, xi, eta); };
    const IntegralResult r = window_integral(inner, w, D, osc, inner_spec);
    inner_ok = inner_ok && r.converged;
    inner_evals += r.evaluations;
    inner_err = std::max(inner_err, r.err_est);
    inner_mag = std::max(inner_mag, std::abs(r.value));
    return r.value;
  };

  const IntegralResult r = window_integral(outer, H, D, osc, spec);
  out.value = r.value;
  // Inner errors enter relative to the largest inner value.
  out.err_est = r.err_est + (inner_mag > 0.0 ? inner_err / inner_mag : 0.0) * std::abs(r.value);
  out.evaluations = r.evaluations + inner_evals;
  out.converged = r.converged && inner_ok && std::isfinite(std::abs(r.value));
  return out;
}

// ---------------------------------------------------------------------------
// Extrapolation

namespace {

// Value at 0 of the polynomial through (x[i], y[i]), i in [first, first + m].
cplx lagrange_at_zero(const std::vector<double>& x, const std::vector<cplx>& y, std::size_t first,
                      std::size_t count, std::vector<double>* abs_coeffs) {
  cplx v{};
  for (std::size_t i = first; i < first + count; ++i) {
    double li = 1.0;
    for (std::size_t j = first; j < first + count; ++j) {
      if (j != i) li *= x[j] / (x[j] - x[i]);
    }
    v += li * y[i];
    if (abs_coeffs) abs_coeffs->push_back(std::abs(li));
  }
  return v;
}

}  // namespace

IntegralResult eps_extrapolate(const std::function<IntegralResult(double)>& f,
                               const greens::Regularization& reg) {
  reg.validate();
  const auto& x = reg.schedule;
  const std::size_t n = x.size();
  const std::size_t m = static_cast<std::size_t>(reg.extrapolation_order);
  std::vector<cplx> y;
  std::vector<double> e;
  IntegralResult out;
  for (double eps : x) {
    IntegralResult r = f(eps);
    y.push_back(r.value);
    e.push_back(r.err_est);
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  std::vector<double> coeffs;
  const cplx best = lagrange_at_zero(x, y, n - m - 1, m + 1, &coeffs);
  const cplx prev = lagrange_at_zero(x, y, n - m - 2 < n ? n - m - 2 : 0, m + 1, nullptr);
  double propagated = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) propagated += coeffs[k] * e[n - m - 1 + k];
  out.value = best;
  // With n == m + 1 there is no previous window; fall back to the last increment.
  const double increment =
      (n >= m + 2) ? std::abs(best - prev) : std::abs(best - y.back());
  out.err_est = increment + propagated;

  double scale = 0.0;
  for (const auto& v : y) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d0 = std::abs(y[k] - y[k - 1]);
    const double d1 = std::abs(y[k + 1] - y[k]);
    if (d1 > d0 + 1e-13 * scale) {
      out.raw_sequence = y;
      break;
    }
  }
  return out;
}

IntegralResult eps_extrapolate(const std::function<cplx(double)>& f,
                               const greens::Regularization& reg) {
  return eps_extrapolate(
      [&f](double eps) {
        IntegralResult r;
        r.value = f(eps);
        r.evaluations = 1;
        return r;
      },
      reg);
}

// ---------------------------------------------------------------------------
// Brute-force oracles

IntegralResult direct_double_integral(const std::function<cplx(double, double)>& f, double tau0,
                                      double tau, const QuadratureSpec& spec, int panels) {
  spec.validate();
  if (!(tau > tau0)) throw std::domain_error("direct_double_integral: requires tau > tau0");
  const double T = tau - tau0;
  IntegralResult out;
  auto run = [&](int n) {
    const UnitRule u = composite_unit(n, std::max(1, panels));
    cplx s{};
    for (std::size_t i = 0; i < u.x.size(); ++i) {
      cplx row{};
      for (std::size_t j = 0; j < u.x.size(); ++j) {
        row += u.w[j] * f(tau0 + T * u.x[i], tau0 + T * u.x[j]);
      }
      s += u.w[i] * row;
      out.evaluations += static_cast<std::int64_t>(u.x.size());
    }
    return T * T * s;
  };
  const cplx hi = run(spec.gauss_nodes);
  const cplx lo = run(spec.gauss_nodes - 2);
  out.value = hi;
  out.err_est = std::abs(hi - lo);
  out.converged = out.err_est <= tolerance(spec, hi) || out.err_est <= 1e-6 * std::abs(hi);
  return out;
}

IntegralResult direct_quadruple_integral(const Integrand4& f, double tau0, double tau,
                                         const QuadratureSpec& spec, int panels) {
  spec.validate();
  if (!(tau > tau0)) throw std::domain_error("direct_quadruple_integral: requires tau > tau0");
  const double T = tau - tau0;
  IntegralResult out;
  auto run = [&](int n) {
    const UnitRule u = composite_unit(n, std::max(1, panels));
    const std::size_t m = u.x.size();
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) t[i] = tau0 + T * u.x[i];
    cplx s{};
    std::array<double, 4> x{};
    for (std::size_t a = 0; a < m; ++a) {
      x[0] = t[a];
      cplx sa{};
      for (std::size_t b = 0; b < m; ++b) {
        x[1] = t[b];
        cplx sb{};
        for (std::size_t c = 0; c < m; ++c) {
          x[2] = t[c];
          cplx sc{};
          for (std::size_t d = 0; d < m; ++d) {
            x[3] = t[d];
            sc += u.w[d] * f(x);
          }
          sb += u.w[c] * sc;
        }
        sa += u.w[b] * sb;
      }
      s += u.w[a] * sa;
    }
    out.evaluations += static_cast<std::int64_t>(m * m * m * m);
    const double T2 = T * T;
    return T2 * T2 * s;
  };
  const cplx hi = run(spec.gauss_nodes);
  const cplx lo = run(spec.gauss_nodes - 2);
  out.value = hi;
  out.err_est = std::abs(hi - lo);
  out.converged = out.err_est <= tolerance(spec, hi) || out.err_est <= 1e-6 * std::abs(hi);
  return out;
}

}  // namespace fermi::quadrature
