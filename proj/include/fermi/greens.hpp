#pragma once

// Two-point kernels of the massless scalar field in 3+1 dimensions
// (natural units), free and with the O(sigma^2) light-cone-fluctuation
// correction.
//
// Distribution-valued kernels are carried as KernelValue: a smooth
// (principal-value) part plus explicit delta terms on the light cone.
//
// The disorder numerator, with the numerator regulator sent to zero:
//
//   F(t, r) = t [5 t^4 + 10 t^2 r^2 + r^4] - 4 t [t^4 - r^4]
//           = t^5 + 10 t^3 r^2 + 5 t r^4,
//
// an odd polynomial in t. The denominators keep their regulator.

#include <complex>
#include <stdexcept>
#include <vector>

namespace fermi::greens {

using cplx = std::complex<double>;

struct SpacetimeInterval {
  double dt = 0.0;      // time separation
  double radius = 0.0;  // spatial separation, >= 0

  void validate() const;
};

/// i-epsilon prescription and the epsilon -> 0 extrapolation schedule.
struct Regularization {
  double eps = 1e-3;
  std::vector<double> schedule{1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};
  int extrapolation_order = 4;

  /// Throws std::invalid_argument unless eps > 0 and the schedule is
  /// strictly decreasing, positive, and long enough for the order.
  void validate() const;
  /// Only eps checked; used by single-eps kernel evaluations.
  void validate_eps() const;
};

struct DeltaTerm {
  double location = 0.0;  // value of dt where the delta fires
  cplx weight{};
};

struct KernelValue {
  cplx smooth{};
  std::vector<DeltaTerm> deltas;  // sorted by location
};

struct DisorderModel {
  double sigma2 = 0.0;

  void validate() const;
};

class OnLightConeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// i / (4 pi^2 (dt^2 - r^2 - i eps)).
cplx feynman_free_ieps(const SpacetimeInterval& iv, const Regularization& reg);

/// Smooth part (i/4pi^2) PV 1/(dt^2 - r^2); deltas -1/(8 pi r) at dt = -r and dt = +r.
/// Throws OnLightConeError when |dt| == r, std::domain_error when r <= 0.
KernelValue feynman_free_split(const SpacetimeInterval& iv);

/// -1 / (4 pi^2 ((dt - i eps)^2 - r^2)).
cplx wightman_free(const SpacetimeInterval& iv, const Regularization& reg);

/// eps -> 0 limit of wightman_free:
/// smooth -(1/4pi^2) PV 1/(dt^2 - r^2); deltas +i/(8 pi r) at -r, -i/(8 pi r) at +r.
KernelValue wightman_free_split(const SpacetimeInterval& iv);

/// dt^5 + 10 dt^3 r^2 + 5 dt r^4.
double disorder_F(const SpacetimeInterval& iv);

/// (6 i sigma^2/(2pi)^3) [F(dt) th(dt) / ((dt - i eps)^2 - r^2)^5
///                       + F(-dt) th(-dt) / ((dt + i eps)^2 - r^2)^5],  th(0) = 1/2.
/// Even in dt. Near the light cone the value is regulator dominated;
/// see near_light_cone().
cplx disorder_I(const SpacetimeInterval& iv, const Regularization& reg, const DisorderModel& dm);

/// disorder_I restricted to positive time separation: I for dt > 0, 0 for dt < 0,
/// I(0)/2 at dt = 0.
cplx disorder_I_plus(const SpacetimeInterval& iv, const Regularization& reg,
                     const DisorderModel& dm);

/// The dt > 0 branch of disorder_I continued to all dt:
///   (6 i sigma^2/(2pi)^3) F(dt) / ((dt - i eps)^2 - r^2)^5.
/// This is the positive-frequency (Wightman) companion of I:
/// disorder_I(dt) = th(dt) W(dt) + th(-dt) W(-dt), and W(-dt) = conj(W(dt)).
cplx disorder_wightman(const SpacetimeInterval& iv, const Regularization& reg,
                       const DisorderModel& dm);

/// eps -> 0 forms, valid strictly inside the light cone's spacelike region
/// |dt| < r. Throw std::domain_error otherwise.
cplx disorder_I_spacelike(const SpacetimeInterval& iv, const DisorderModel& dm);
cplx disorder_wightman_spacelike(const SpacetimeInterval& iv, const DisorderModel& dm);

/// True when | |dt| - r | is within a few regulator widths.
bool near_light_cone(const SpacetimeInterval& iv, const Regularization& reg);

}  // namespace fermi::greens
