#pragma once

// Integration machinery for the transition probabilities.
//
// Every time-double-integral over a window [tau0, tau]^2 whose kernel depends
// only on the time difference collapses to a one-dimensional integral over
// xi = u - v in [-dtau, dtau] against a continuous window weight:
//
//   int int du dv e^{-i w (u - v)} K(u - v) = int dxi (dtau - |xi|) e^{-i w xi} K(xi)
//   int int du dv e^{s i w (u + v)} K(u - v) = int dxi E_s(xi) K(xi)
//
// with E_s(xi) = (1/2) int_{2 tau0 + |xi|}^{2 tau - |xi|} e^{s i w eta} d eta.
// Delta terms of a kernel are sifted analytically, simple poles are taken as
// principal values by symmetric-pair subtraction.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "fermi/greens.hpp"

namespace fermi::quadrature {

using cplx = std::complex<double>;

struct QuadratureSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-40;
  int max_subdivisions = 4000;
  int gauss_nodes = 16;  // per axis, tensor and simplex rules

  void validate() const;
};

struct IntegralResult {
  cplx value{};
  double err_est = 0.0;
  std::int64_t evaluations = 0;
  bool converged = true;
  /// Value depends on a finite regulator and was not extrapolated.
  bool regulated = false;
  /// eps_extrapolate only: the raw sequence when convergence was not monotone.
  std::vector<cplx> raw_sequence;

  IntegralResult& operator+=(const IntegralResult& o);
};

IntegralResult operator+(IntegralResult a, const IntegralResult& b);
/// Product of two independent results; error propagated to first order.
IntegralResult product(const IntegralResult& a, const IntegralResult& b);
IntegralResult scaled(const IntegralResult& a, cplx factor);
IntegralResult conj(const IntegralResult& a);

using RealFunction = std::function<cplx(double)>;

/// A kernel of the time difference, possibly distribution valued.
struct Kernel {
  RealFunction smooth;
  std::vector<greens::DeltaTerm> deltas;
  /// Simple poles of `smooth`: integrated as principal values.
  std::vector<double> pv_poles;
  /// Extra panel boundaries (sharp but integrable features).
  std::vector<double> breakpoints;
  bool regulated = false;
};

Kernel smooth_kernel(RealFunction f);

/// Global adaptive Gauss-Kronrod (10-point Gauss, 21-point Kronrod) on [a, b],
/// split initially at the given interior points.
IntegralResult adaptive_integrate(const RealFunction& f, double a, double b,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& interior = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// int_{-dtau}^{dtau} weight(xi) K(xi) d xi for a continuous weight supported
/// on the window. Deltas at |xi0| < dtau are sifted, |xi0| == dtau counts
/// half. `oscillation` is the angular frequency of the weight, used for
/// panel splitting.
IntegralResult window_integral(const Kernel& kernel, const RealFunction& weight, double dtau,
                               double oscillation, const QuadratureSpec& spec);

/// int_{-dtau}^{dtau} (dtau - |xi|) e^{-i omega0 xi} K(xi) d xi.
IntegralResult weighted_xi_integral(const Kernel& kernel, double omega0, double dtau,
                                    const QuadratureSpec& spec);

/// int int_{[tau0,tau]^2} du dv e^{sign i omega0 (u + v)} K(u - v), sign = +-1.
IntegralResult phase_sum_integral(const Kernel& kernel, double omega0, double tau0, double tau,
                                  int sign, const QuadratureSpec& spec);

/// theta(tau_later - tau_earlier), labels 1..4.
struct TimeOrder {
  int later;
  int earlier;
};

using Integrand4 = std::function<cplx(const std::array<double, 4>&)>;

/// Integral over the part of [tau0, tau]^4 selected by the constraints.
/// The region is decomposed into the fully ordered simplices compatible
/// with the constraints; each simplex is mapped to the unit cube by
/// collapsed coordinates and integrated with tensor Gauss-Legendre.
/// Contradictory constraints give an exact zero.
IntegralResult ordered_integral_4d(const Integrand4& integrand,
                                   const std::vector<TimeOrder>& constraints, double tau0,
                                   double tau, const QuadratureSpec& spec);

/// Number of full orderings of four times compatible with the constraints.
int compatible_orderings(const std::vector<TimeOrder>& constraints);

/// Kernel argument t_a - t_b, labels 1..4.
struct LabelPair {
  int a;
  int b;
};

/// int over the part of [tau0, tau]^4 selected by the constraints of
///
///   exp(i sum_k phase[k] t_k) K1(t_a - t_b) K2(t_c - t_d),
///
/// where first = (a, b), second = (c, d) and {a, b, c, d} = {1, 2, 3, 4}.
/// The phase coefficients must sum to zero. The integral is taken over the
/// two kernel arguments; the remaining integral over the window, a
/// trapezoid in u - v, is done in closed form. Kernels keep their poles and
/// deltas, so distribution-valued kernels are handled exactly.
IntegralResult pair_product_integral(const Kernel& k1, LabelPair first, const Kernel& k2,
                                     LabelPair second, const std::array<double, 4>& phase,
                                     const std::vector<TimeOrder>& constraints, double tau0,
                                     double tau, const QuadratureSpec& spec);

/// Richardson extrapolation of f(eps) -> eps = 0 over reg.schedule,
/// polynomial in eps of degree reg.extrapolation_order.
IntegralResult eps_extrapolate(const std::function<IntegralResult(double)>& f,
                               const greens::Regularization& reg);
IntegralResult eps_extrapolate(const std::function<cplx(double)>& f,
                               const greens::Regularization& reg);

/// Brute-force tensor Gauss-Legendre over the full box, composite with
/// `panels` per axis. Validation only.
IntegralResult direct_double_integral(const std::function<cplx(double, double)>& f, double tau0,
                                      double tau, const QuadratureSpec& spec, int panels = 1);
IntegralResult direct_quadruple_integral(const Integrand4& f, double tau0, double tau,
                                         const QuadratureSpec& spec, int panels = 1);

}  // namespace fermi::quadrature
