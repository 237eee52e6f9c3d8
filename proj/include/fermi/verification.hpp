#pragma once

// Built-in acceptance checks, grouped in suites. Shared by the CLI and the
// acceptance test binary.

#include <string>
#include <vector>

#include "fermi/scenarios.hpp"

namespace fermi::verification {

struct Criterion {
  std::string id;
  std::string title;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // how measured is tested against tolerance
  std::string detail;
  double runtime_s = 0.0;
};

struct Report {
  std::string suite;
  std::vector<Criterion> criteria;

  bool all_passed() const;
};

/// kernels, quadrature, causality, wavezone, all.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

/// Throws std::invalid_argument for an unknown suite or invalid options.
Report run_suite(const std::string& name, const scenarios::EngineOptions& opt = {});

/// Single criterion by id ("A1".."A8").
Criterion run_criterion(const std::string& id, const scenarios::EngineOptions& opt = {});

std::string format_line(const Criterion& c);

}  // namespace fermi::verification
