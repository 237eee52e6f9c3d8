#include "fermi/greens.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fermi::greens {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double four_pi2 = 4.0 * pi * pi;
constexpr double two_pi_cubed = 8.0 * pi * pi * pi;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

cplx pow5(cplx z) {
  const cplx z2 = z * z;
  return z2 * z2 * z;
}

cplx disorder_prefactor(const DisorderModel& dm) {
  return {0.0, 6.0 * dm.sigma2 / two_pi_cubed};
}

}  // namespace

void SpacetimeInterval::validate() const {
  require_finite(dt, "dt");
  require_finite(radius, "radius");
  if (radius < 0.0) {
    throw std::domain_error("radius must be >= 0");
  }
}

void Regularization::validate_eps() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("regularization eps must be positive and finite");
  }
}

void Regularization::validate() const {
  validate_eps();
  if (schedule.size() < 3) {
    throw std::invalid_argument("regularization schedule needs at least 3 levels");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || !std::isfinite(schedule[i])) {
      throw std::invalid_argument("regularization schedule entries must be positive");
    }
    if (i > 0 && !(schedule[i] < schedule[i - 1])) {
      throw std::invalid_argument("regularization schedule must be strictly decreasing");
    }
  }
  if (extrapolation_order < 1 ||
      static_cast<std::size_t>(extrapolation_order) >= schedule.size()) {
    throw std::invalid_argument("extrapolation_order must be in [1, schedule size)");
  }
}

void DisorderModel::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw std::domain_error("sigma2 must be finite and >= 0");
  }
}

cplx feynman_free_ieps(const SpacetimeInterval& iv, const Regularization& reg) {
  iv.validate();
  reg.validate_eps();
  const cplx den{iv.dt * iv.dt - iv.radius * iv.radius, -reg.eps};
  return cplx{0.0, 1.0} / (four_pi2 * den);
}

KernelValue feynman_free_split(const SpacetimeInterval& iv) {
  iv.validate();
  const double r = iv.radius;
  if (!(r > 0.0)) {
    throw std::domain_error("feynman_free_split: radius must be > 0");
  }
  if (std::abs(iv.dt) == r) {
    throw OnLightConeError("feynman_free_split: smooth part undefined on the light cone");
  }
  KernelValue kv;
  kv.smooth = cplx{0.0, 1.0 / (four_pi2 * ((iv.dt - r) * (iv.dt + r)))};
  // -(1/8 pi r) sgn(dt) [delta(r - dt) - delta(r + dt)]: both carry -1/(8 pi r).
  const double w = -1.0 / (8.0 * pi * r);
  kv.deltas = {{-r, cplx{w, 0.0}}, {r, cplx{w, 0.0}}};
  return kv;
}

cplx wightman_free(const SpacetimeInterval& iv, const Regularization& reg) {
  iv.validate();
  reg.validate_eps();
  const cplx t{iv.dt, -reg.eps};
  return -1.0 / (four_pi2 * (t * t - iv.radius * iv.radius));
}

KernelValue wightman_free_split(const SpacetimeInterval& iv) {
  iv.validate();
  const double r = iv.radius;
  if (!(r > 0.0)) {
    throw std::domain_error("wightman_free_split: radius must be > 0");
  }
  if (std::abs(iv.dt) == r) {
    throw OnLightConeError("wightman_free_split: smooth part undefined on the light cone");
  }
  KernelValue kv;
  kv.smooth = cplx{-1.0 / (four_pi2 * ((iv.dt - r) * (iv.dt + r))), 0.0};
  // 1/((t - i eps)^2 - r^2) = (1/2r)[1/(t - r - i eps) - 1/(t + r - i eps)]
  const double w = 1.0 / (8.0 * pi * r);
  kv.deltas = {{-r, cplx{0.0, w}}, {r, cplx{0.0, -w}}};
  return kv;
}

double disorder_F(const SpacetimeInterval& iv) {
  iv.validate();
  const double t = iv.dt;
  const double r2 = iv.radius * iv.radius;
  return t * (t * t * (t * t + 10.0 * r2) + 5.0 * r2 * r2);
}

cplx disorder_I(const SpacetimeInterval& iv, const Regularization& reg,
                const DisorderModel& dm) {
  iv.validate();
  reg.validate_eps();
  dm.validate();
  const double r2 = iv.radius * iv.radius;
  const double t = iv.dt;
  const cplx c = disorder_prefactor(dm);
  cplx value{};
  if (t >= 0.0) {
    const cplx z{t, -reg.eps};
    const double th = t > 0.0 ? 1.0 : 0.5;
    value += th * disorder_F({t, iv.radius}) / pow5(z * z - r2);
  }
  if (t <= 0.0) {
    const cplx z{t, reg.eps};
    const double th = t < 0.0 ? 1.0 : 0.5;
    value += th * disorder_F({-t, iv.radius}) / pow5(z * z - r2);
  }
  return c * value;
}

cplx disorder_I_plus(const SpacetimeInterval& iv, const Regularization& reg,
                     const DisorderModel& dm) {
  if (iv.dt < 0.0) {
    iv.validate();
    reg.validate_eps();
    dm.validate();
    return {};
  }
  const cplx full = disorder_I(iv, reg, dm);
  // At dt = 0 disorder_I already sums two half-weighted branches.
  return iv.dt == 0.0 ? 0.5 * full : full;
}

cplx disorder_wightman(const SpacetimeInterval& iv, const Regularization& reg,
                       const DisorderModel& dm) {
  iv.validate();
  reg.validate_eps();
  dm.validate();
  const cplx z{iv.dt, -reg.eps};
  return disorder_prefactor(dm) * disorder_F(iv) / pow5(z * z - iv.radius * iv.radius);
}

namespace {
void require_spacelike(const SpacetimeInterval& iv) {
  iv.validate();
  if (!(std::abs(iv.dt) < iv.radius)) {
    throw std::domain_error("eps -> 0 disorder kernel requires |dt| < r");
  }
}
}  // namespace

cplx disorder_I_spacelike(const SpacetimeInterval& iv, const DisorderModel& dm) {
  require_spacelike(iv);
  dm.validate();
  const double den = iv.dt * iv.dt - iv.radius * iv.radius;
  const double den5 = den * den * den * den * den;
  return disorder_prefactor(dm) * (disorder_F({std::abs(iv.dt), iv.radius}) / den5);
}

cplx disorder_wightman_spacelike(const SpacetimeInterval& iv, const DisorderModel& dm) {
  require_spacelike(iv);
  dm.validate();
  const double den = iv.dt * iv.dt - iv.radius * iv.radius;
  const double den5 = den * den * den * den * den;
  return disorder_prefactor(dm) * (disorder_F(iv) / den5);
}

bool near_light_cone(const SpacetimeInterval& iv, const Regularization& reg) {
  return std::abs(std::abs(iv.dt) - iv.radius) <= 10.0 * reg.eps;
}

}  // namespace fermi::greens
