#pragma once

// Closed forms for the precursor amplitude and the wave-zone disorder term.

#include <complex>

namespace fermi::asymptotics {

using cplx = std::complex<double>;

/// Principal-value part of A for dtau < r, W = omega0 dtau, y = omega0 r:
///
///   A_pv = (i / (4 pi^2 y)) [J(-y) - J(y)],
///   J(a) = (W + a) [cos a (Ci|W + a| - Ci|a|) + sin a (Si(W + a) - Si(a))]
///
/// from 1/(xi^2 - r^2) = (1/2r)[1/(xi - r) - 1/(xi + r)] and
/// int (W - |xi|) e^{-i xi} / (xi - a) over the window.
/// Throws std::domain_error unless 0 < dtau < r.
cplx precursor_closed_form_A(double omega0, double r, double dtau);

/// -i pi sigma2 omega0^3 sin(omega0 dtau) / (2 pi)^4.
cplx wave_zone_disorder(double omega0, double sigma2, double dtau);

/// Large-r form of the disorder amplitude at fixed dtau < r: the kernel
/// tends to -(30 i sigma2/(2pi)^3) |dt| / r^6, giving
///   -(60 i sigma2 / ((2pi)^3 omega0^3 r^6)) (2 sin x - x (1 + cos x)),  x = omega0 dtau.
cplx disorder_far_field(double omega0, double sigma2, double r, double dtau);

/// sigma2 omega0^2.
double crossover_r0(double sigma2, double omega0);

}  // namespace fermi::asymptotics
