#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermi/scenarios.hpp"

namespace fermi::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  scenarios::SystemParams params;
  scenarios::EngineOptions options;
  std::vector<scenarios::Scenario> scenarios{scenarios::Scenario::PhiF};
  bool diagnostics = true;
};

struct SweepConfig {
  RunConfig base;
  /// Axis name -> values, in canonical order (omega0, r, sigma2, dtau, lambda, tau0).
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::size_t max_points = 100000;
  unsigned threads = 0;  // 0: not set in the file
};

const std::vector<std::string>& axis_names();

/// Throws ConfigError on parse or validation failure.
RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);
/// Regularization and quadrature settings only; params may be absent.
scenarios::EngineOptions load_engine_options(const std::string& path);

std::size_t grid_size(const SweepConfig& cfg);
/// Grid point k in lexicographic order, first axis slowest.
scenarios::SystemParams grid_point(const SweepConfig& cfg, std::size_t k);

}  // namespace fermi::cli
