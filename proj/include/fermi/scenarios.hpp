#pragma once

// Transition probabilities of the two-qubit problem to fourth order in the
// coupling, free and with the O(sigma^2) disorder correction.
//
// Internally everything runs in omega0-scaled variables (x = omega0 dt,
// y = omega0 r, s = sigma2 omega0^3). Probabilities and amplitudes are
// dimensionless, so the physical and scaled values coincide. The
// regulator eps is a scaled quantity.

#include <optional>
#include <string>
#include <vector>

#include "fermi/greens.hpp"
#include "fermi/quadrature.hpp"

namespace fermi::scenarios {

using cplx = std::complex<double>;
using quadrature::IntegralResult;

struct SystemParams {
  double omega0 = 1.0;
  double r = 1.0;
  double lambda = 1.0;
  double tau0 = 0.0;
  double tau = 1.0;
  double sigma2 = 0.0;

  double dtau() const { return tau - tau0; }
  void validate() const;  // std::invalid_argument
};

enum class Scenario { PhiF = 1, PsiF = 2, BigPhiF = 3 };
enum class Regime { Precursor, LightCone };

const char* to_string(Scenario s);
const char* to_string(Regime r);

/// How the positive-time-restricted disorder kernel enters Wightman pairs.
enum class IPlusConvention {
  /// Positive-time branch of I continued to all dt (Hermitian).
  Analytic,
  /// I for dt > 0, zero for dt < 0.
  Restricted,
};

struct EngineOptions {
  greens::Regularization reg;
  quadrature::QuadratureSpec spec;
  bool include_r_independent = false;
  IPlusConvention i_plus = IPlusConvention::Analytic;

  void validate() const;
};

struct Term {
  std::string label;
  IntegralResult value;
  /// Part of probability_r_dependent.
  bool additive = true;
  /// O(sigma^2) contribution.
  bool disorder = false;
};

struct TermBreakdown {
  std::vector<Term> terms;  // insertion order is the report order

  void add(std::string label, IntegralResult value, bool additive = true, bool disorder = false);
  const Term* find(const std::string& label) const;
  /// Sum of the additive terms, in order.
  IntegralResult total() const;
  /// Sum of the additive terms without the disorder ones.
  IntegralResult free_total() const;
};

struct ScenarioResult {
  SystemParams params;
  Scenario scenario = Scenario::PhiF;
  bool with_disorder = false;
  TermBreakdown breakdown;
  IntegralResult probability_r_dependent;
  Regime regime = Regime::Precursor;
  bool wave_zone = false;  // omega0 r >= wave_zone_threshold
  bool regulated = false;  // some additive term used a finite regulator
  bool converged = true;   // all additive terms converged
  /// Largest |additive term|; scale for the residual.
  double largest_term = 0.0;
};

inline constexpr double wave_zone_threshold = 50.0;

struct Amplitude {
  IntegralResult pv;
  IntegralResult delta;
  IntegralResult total;
};

/// A = int (dtau - |xi|) e^{-i omega0 xi} G0(xi, r) d xi with the split
/// Feynman kernel; light-cone deltas sifted analytically.
Amplitude amplitude_free_A(const SystemParams& p, const quadrature::QuadratureSpec& spec);

/// The disorder correction to A: int (dtau - |xi|) e^{-i omega0 xi} I(xi, r) d xi.
/// eps -> 0 kernel for dtau < r, finite eps (regulated) otherwise.
IntegralResult disorder_amplitude(const SystemParams& p, const EngineOptions& opt);

ScenarioResult scenario1_free(const SystemParams& p, const EngineOptions& opt);
ScenarioResult scenario1_disorder(const SystemParams& p, const EngineOptions& opt);
ScenarioResult scenario2_free(const SystemParams& p, const EngineOptions& opt);
ScenarioResult scenario2_disorder(const SystemParams& p, const EngineOptions& opt);
ScenarioResult scenario3_free(const SystemParams& p, const EngineOptions& opt);
ScenarioResult scenario3_disorder(const SystemParams& p, const EngineOptions& opt);

/// Free variant when sigma2 == 0, disorder variant otherwise.
ScenarioResult evaluate(Scenario s, const SystemParams& p, const EngineOptions& opt);

struct CausalityDiagnostics {
  IntegralResult precursor_probability;
  double mirrored_dtau = 0.0;
  IntegralResult mirrored_probability;
  double precursor_ratio = 0.0;  // |precursor| / |mirrored|
  /// log-log slope of free |A|^2 against omega0 r at fixed omega0 dtau.
  double suppression_exponent = 0.0;
  std::vector<double> exponent_grid;  // omega0 r values used
  IntegralResult free_residual;
  IntegralResult disorder_residual;
  bool regulated = false;
};

/// Requires result.regime == Precursor, std::domain_error otherwise.
CausalityDiagnostics causality_diagnostics(const ScenarioResult& result, const EngineOptions& opt,
                                           std::vector<double> grid = {30.0, 100.0, 300.0});

/// Slope of log |A|^2 against log(omega0 r) over grid at fixed omega0 dtau.
double suppression_exponent(double omega0_dtau, const std::vector<double>& grid,
                            const quadrature::QuadratureSpec& spec);

struct Crossover {
  double r0 = 0.0;
  bool found = false;
};

/// Largest r > dtau at which |disorder_amplitude| = |A|. Beyond it the free
/// precursor dominates.
Crossover find_crossover_radius(double omega0, double sigma2, double dtau,
                                const EngineOptions& opt, double r_max_factor = 1e3);

}  // namespace fermi::scenarios
