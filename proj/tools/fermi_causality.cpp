// fermi_causality: single runs, parameter sweeps and the verification suite.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "config.hpp"
#include "fermi/scenarios.hpp"
#include "fermi/verification.hpp"

namespace {

using fermi::cli::ConfigError;
using fermi::quadrature::IntegralResult;
using fermi::scenarios::ScenarioResult;
using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_invalid = 2;
constexpr int exit_convergence = 3;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const IntegralResult& r) {
  return {{"re", number(r.value.real())},
          {"im", number(r.value.imag())},
          {"err_est", number(r.err_est)},
          {"converged", r.converged},
          {"regulated", r.regulated},
          {"evaluations", r.evaluations}};
}

json params_json(const fermi::scenarios::SystemParams& p) {
  return {{"omega0", p.omega0}, {"r", p.r},         {"lambda", p.lambda},
          {"tau0", p.tau0},     {"tau", p.tau},     {"dtau", p.dtau()},
          {"sigma2", p.sigma2}};
}

json dimensionless_json(const fermi::scenarios::SystemParams& p, double eps) {
  const double w = p.omega0;
  return {{"omega0_r", w * p.r},
          {"omega0_dtau", w * p.dtau()},
          {"omega0_tau0", w * p.tau0},
          {"sigma2_omega0_cubed", p.sigma2 * w * w * w},
          {"eps", eps}};
}

json options_json(const fermi::scenarios::EngineOptions& o) {
  return {{"regularization",
           {{"eps", o.reg.eps},
            {"schedule", o.reg.schedule},
            {"extrapolation_order", o.reg.extrapolation_order}}},
          {"quadrature",
           {{"rel_tol", o.spec.rel_tol},
            {"abs_tol", o.spec.abs_tol},
            {"max_subdivisions", o.spec.max_subdivisions},
            {"gauss_nodes", o.spec.gauss_nodes}}},
          {"include_r_independent", o.include_r_independent},
          {"i_plus", o.i_plus == fermi::scenarios::IPlusConvention::Analytic ? "analytic"
                                                                             : "restricted"}};
}

json result_json(const ScenarioResult& r) {
  json terms = json::array();
  for (const auto& t : r.breakdown.terms) {
    json j = {{"label", t.label}, {"additive", t.additive}, {"disorder", t.disorder}};
    const json value = to_json(t.value);
    for (const auto& [k, v] : value.items()) j[k] = v;
    terms.push_back(j);
  }
  return {{"scenario", static_cast<int>(r.scenario)},
          {"final_state", fermi::scenarios::to_string(r.scenario)},
          {"with_disorder", r.with_disorder},
          {"regime", fermi::scenarios::to_string(r.regime)},
          {"wave_zone", r.wave_zone},
          {"regulated", r.regulated},
          {"converged", r.converged},
          {"probability_r_dependent", to_json(r.probability_r_dependent)},
          {"largest_term", r.largest_term},
          {"terms", terms}};
}

json diagnostics_json(const fermi::scenarios::CausalityDiagnostics& d) {
  return {{"precursor_probability", to_json(d.precursor_probability)},
          {"mirrored_dtau", d.mirrored_dtau},
          {"mirrored_probability", to_json(d.mirrored_probability)},
          {"precursor_ratio", number(d.precursor_ratio)},
          {"suppression_exponent", number(d.suppression_exponent)},
          {"exponent_grid_omega0_r", d.exponent_grid},
          {"free_residual", to_json(d.free_residual)},
          {"disorder_residual", to_json(d.disorder_residual)},
          {"regulated", d.regulated}};
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

unsigned resolve_threads(int flag, unsigned from_config) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("FERMI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  if (from_config > 0) return from_config;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

int run_single(const std::string& config_path, const std::string& out_path) {
  const auto cfg = fermi::cli::load_run_config(config_path);
  json doc;
  doc["engine"] = {{"name", "fermi_causality"}, {"version", FERMI_VERSION}};
  doc["params"] = params_json(cfg.params);
  doc["dimensionless"] = dimensionless_json(cfg.params, cfg.options.reg.eps);
  doc["options"] = options_json(cfg.options);
  doc["wave_zone_threshold_omega0_r"] = fermi::scenarios::wave_zone_threshold;
  json results = json::array();
  bool converged = true;
  for (auto s : cfg.scenarios) {
    const auto r = fermi::scenarios::evaluate(s, cfg.params, cfg.options);
    converged = converged && r.converged;
    json j = result_json(r);
    if (cfg.diagnostics && r.regime == fermi::scenarios::Regime::Precursor) {
      j["diagnostics"] = diagnostics_json(fermi::scenarios::causality_diagnostics(r, cfg.options));
    } else {
      j["diagnostics"] = nullptr;
    }
    results.push_back(j);
  }
  doc["results"] = results;
  doc["status"] = converged ? "ok" : "not_converged";
  if (!write_text(out_path, doc.dump(2) + "\n")) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return exit_failed;
  }
  return converged ? exit_ok : exit_convergence;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

constexpr const char* csv_header =
    "omega0,r,sigma2,dtau,scenario,term,re,im,err_est,regime,status,"
    "lambda,tau0,omega0_r,omega0_dtau,sigma2_omega0_cubed,eps,additive,regulated\r\n";

std::string row_prefix(const fermi::scenarios::SystemParams& p) {
  return num(p.omega0) + "," + num(p.r) + "," + num(p.sigma2) + "," + num(p.dtau()) + ",";
}

std::string row_suffix(const fermi::scenarios::SystemParams& p, double eps) {
  const double w = p.omega0;
  return num(p.lambda) + "," + num(p.tau0) + "," + num(w * p.r) + "," + num(w * p.dtau()) + "," +
         num(p.sigma2 * w * w * w) + "," + num(eps);
}

struct PointRows {
  std::string text;
  bool ok = true;
};

PointRows sweep_point(const fermi::cli::SweepConfig& cfg, std::size_t k) {
  PointRows out;
  const auto p = fermi::cli::grid_point(cfg, k);
  const double eps = cfg.base.options.reg.eps;
  for (auto s : cfg.base.scenarios) {
    const std::string sc = std::to_string(static_cast<int>(s));
    try {
      const auto r = fermi::scenarios::evaluate(s, p, cfg.base.options);
      const std::string regime = fermi::scenarios::to_string(r.regime);
      auto emit = [&](const std::string& label, const IntegralResult& v, bool additive) {
        const std::string status = v.converged ? "ok" : "not_converged";
        out.ok = out.ok && (v.converged || !additive);
        out.text += row_prefix(p) + sc + "," + csv_field(label) + "," + num(v.value.real()) + "," +
                    num(v.value.imag()) + "," + num(v.err_est) + "," + regime + "," + status +
                    "," + row_suffix(p, eps) + "," + (additive ? "1" : "0") + "," +
                    (v.regulated ? "1" : "0") + "\r\n";
      };
      for (const auto& t : r.breakdown.terms) emit(t.label, t.value, t.additive);
      emit("probability_r_dependent", r.probability_r_dependent, true);
    } catch (const std::exception& e) {
      out.ok = false;
      out.text += row_prefix(p) + sc + ",,,,,," + csv_field(std::string("error: ") + e.what()) +
                  "," + row_suffix(p, eps) + ",,\r\n";
    }
  }
  return out;
}

int run_sweep(const std::string& config_path, const std::string& out_path, int threads_flag) {
  const auto cfg = fermi::cli::load_sweep_config(config_path);
  const std::size_t n = fermi::cli::grid_size(cfg);
  const unsigned nthreads =
      std::min<std::size_t>(resolve_threads(threads_flag, cfg.threads), std::max<std::size_t>(n, 1));
  std::vector<PointRows> rows(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < n; k = next++) rows[k] = sweep_point(cfg, k);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string text = csv_header;
  bool ok = true;
  for (const auto& r : rows) {
    text += r.text;
    ok = ok && r.ok;
  }
  if (!write_text(out_path, text)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return exit_failed;
  }
  return ok ? exit_ok : exit_convergence;
}

int run_verify(const std::string& suite, const std::string& report_path,
               const std::string& config_path) {
  if (!fermi::verification::is_suite(suite)) {
    std::cerr << "error: unknown suite '" << suite << "' (kernels, quadrature, causality, wavezone, all)\n";
    return exit_invalid;
  }
  fermi::scenarios::EngineOptions opt;
  if (!config_path.empty()) opt = fermi::cli::load_engine_options(config_path);
  const auto rep = fermi::verification::run_suite(suite, opt);
  json crit = json::array();
  for (const auto& c : rep.criteria) {
    std::cout << fermi::verification::format_line(c) << "\n";
    crit.push_back({{"id", c.id},
                    {"title", c.title},
                    {"passed", c.passed},
                    {"measured", number(c.measured)},
                    {"tolerance", c.tolerance},
                    {"comparison", c.comparison},
                    {"detail", c.detail},
                    {"runtime_s", c.runtime_s}});
  }
  const bool pass = rep.all_passed();
  std::cout << (pass ? "suite " + suite + ": PASS\n" : "suite " + suite + ": FAIL\n");
  if (!report_path.empty()) {
    json doc = {{"engine", {{"name", "fermi_causality"}, {"version", FERMI_VERSION}}},
                {"suite", suite},
                {"passed", pass},
                {"options", options_json(opt)},
                {"criteria", crit}};
    if (!write_text(report_path, doc.dump(2) + "\n")) {
      std::cerr << "error: cannot write " << report_path << "\n";
      return exit_failed;
    }
  }
  return pass ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition probabilities and causality diagnostics for the two-qubit Fermi problem"};
  app.set_version_flag("--version", std::string("fermi_causality ") + FERMI_VERSION);
  app.require_subcommand(1);

  std::string config, out, suite, report;
  int threads = 0;

  auto* single = app.add_subcommand("single", "Evaluate one parameter point, write JSON");
  single->add_option("--config", config, "TOML configuration")->required();
  single->add_option("--out", out, "Output JSON file")->required();

  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid, write CSV");
  sweep->add_option("--config", config, "TOML configuration with a [sweep] table")->required();
  sweep->add_option("--out", out, "Output CSV file")->required();
  sweep->add_option("--threads", threads, "Worker threads (overrides FERMI_THREADS)")
      ->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite, "kernels | quadrature | causality | wavezone | all")
      ->required();
  verify->add_option("--report", report, "Output JSON report");
  verify->add_option("--config", config, "Optional TOML with [regularization]/[quadrature]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (*single) return run_single(config, out);
    if (*sweep) return run_sweep(config, out, threads);
    if (*verify) return run_verify(suite, report, config);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failed;
  }
  return exit_invalid;
}
