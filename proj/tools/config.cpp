#include "config.hpp"

#include <cmath>
#include <optional>

#define TOML_HEADER_ONLY 1
#include "toml.hpp"

namespace fermi::cli {

namespace {

toml::table parse_file(const std::string& path) {
  try {
    return toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw ConfigError(path + ": " + std::string(e.description()));
  }
}

std::optional<double> number(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value<double>()) return *v;
  throw ConfigError(std::string("'") + key + "' must be a number");
}

double required(const toml::table& t, const char* key, const char* section) {
  auto v = number(t, key);
  if (!v) throw ConfigError(std::string("missing required key '") + section + "." + key + "'");
  return *v;
}

std::vector<double> number_array(const toml::node& n, const std::string& what) {
  const toml::array* a = n.as_array();
  if (!a) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *a) {
    auto v = e.value<double>();
    if (!v) throw ConfigError(what + " must contain only numbers");
    out.push_back(*v);
  }
  return out;
}

const toml::table* section(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
  return n->as_table();
}

scenarios::EngineOptions engine_options(const toml::table& root) {
  scenarios::EngineOptions o;
  if (const auto* reg = section(root, "regularization")) {
    if (auto v = number(*reg, "eps")) o.reg.eps = *v;
    if (const auto* s = reg->get("schedule")) o.reg.schedule = number_array(*s, "regularization.schedule");
    if (auto v = reg->get("extrapolation_order")) {
      auto i = v->value<int64_t>();
      if (!i) throw ConfigError("regularization.extrapolation_order must be an integer");
      o.reg.extrapolation_order = static_cast<int>(*i);
    }
  }
  if (const auto* q = section(root, "quadrature")) {
    if (auto v = number(*q, "rel_tol")) o.spec.rel_tol = *v;
    if (auto v = number(*q, "abs_tol")) o.spec.abs_tol = *v;
    for (const char* key : {"max_subdivisions", "gauss_nodes"}) {
      if (const auto* n = q->get(key)) {
        auto i = n->value<int64_t>();
        if (!i) throw ConfigError(std::string("quadrature.") + key + " must be an integer");
        (std::string(key) == "gauss_nodes" ? o.spec.gauss_nodes : o.spec.max_subdivisions) =
            static_cast<int>(*i);
      }
    }
  }
  if (const auto* run = section(root, "run")) {
    if (const auto* n = run->get("include_r_independent")) {
      auto b = n->value<bool>();
      if (!b) throw ConfigError("run.include_r_independent must be a boolean");
      o.include_r_independent = *b;
    }
    if (const auto* n = run->get("i_plus")) {
      auto s = n->value<std::string>();
      if (s && *s == "analytic") {
        o.i_plus = scenarios::IPlusConvention::Analytic;
      } else if (s && *s == "restricted") {
        o.i_plus = scenarios::IPlusConvention::Restricted;
      } else {
        throw ConfigError("run.i_plus must be \"analytic\" or \"restricted\"");
      }
    }
  }
  try {
    o.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return o;
}

scenarios::SystemParams system_params(const toml::table& root, bool allow_missing_axes,
                                      const std::vector<std::string>& axes) {
  const auto* p = section(root, "params");
  toml::table empty;
  const toml::table& t = p ? *p : empty;
  auto on_axis = [&](const char* k) {
    for (const auto& a : axes) {
      if (a == k) return true;
    }
    return false;
  };
  auto get = [&](const char* key, std::optional<double> fallback) -> double {
    if (auto v = number(t, key)) return *v;
    if (allow_missing_axes && on_axis(key)) return 1.0;  // overwritten per grid point
    if (fallback) return *fallback;
    return required(t, key, "params");
  };
  scenarios::SystemParams sp;
  sp.omega0 = get("omega0", std::nullopt);
  sp.r = get("r", std::nullopt);
  sp.lambda = get("lambda", 1.0);
  sp.tau0 = get("tau0", 0.0);
  sp.sigma2 = get("sigma2", 0.0);
  const auto tau = number(t, "tau");
  const auto dtau = number(t, "dtau");
  if (tau && dtau) throw ConfigError("give either params.tau or params.dtau, not both");
  if (tau) {
    sp.tau = *tau;
  } else if (dtau) {
    sp.tau = sp.tau0 + *dtau;
  } else if (allow_missing_axes && on_axis("dtau")) {
    sp.tau = sp.tau0 + 1.0;
  } else {
    throw ConfigError("missing required key 'params.tau' (or 'params.dtau')");
  }
  if (!allow_missing_axes) {
    try {
      sp.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return sp;
}

RunConfig run_config(const toml::table& root, bool sweep, const std::vector<std::string>& axes) {
  RunConfig c;
  c.options = engine_options(root);
  c.params = system_params(root, sweep, axes);
  if (const auto* run = section(root, "run")) {
    if (const auto* n = run->get("scenarios")) {
      c.scenarios.clear();
      for (double v : number_array(*n, "run.scenarios")) {
        if (v == 1.0) c.scenarios.push_back(scenarios::Scenario::PhiF);
        else if (v == 2.0) c.scenarios.push_back(scenarios::Scenario::PsiF);
        else if (v == 3.0) c.scenarios.push_back(scenarios::Scenario::BigPhiF);
        else throw ConfigError("run.scenarios entries must be 1, 2 or 3");
      }
      if (c.scenarios.empty()) throw ConfigError("run.scenarios must not be empty");
    }
    if (const auto* n = run->get("diagnostics")) {
      auto b = n->value<bool>();
      if (!b) throw ConfigError("run.diagnostics must be a boolean");
      c.diagnostics = *b;
    }
  }
  return c;
}

std::vector<double> axis_values(const toml::node& n, const std::string& name) {
  const std::string what = "sweep.axes." + name;
  if (n.is_array()) return number_array(n, what);
  const toml::table* t = n.as_table();
  if (!t) throw ConfigError(what + " must be an array or a table");
  if (const auto* l = t->get("list")) return number_array(*l, what + ".list");
  if (const auto* g = t->get("geometric")) {
    const auto v = number_array(*g, what + ".geometric");
    if (v.size() != 3 || !(v[0] > 0.0) || !(v[1] > 0.0) || v[2] < 1.0 || v[2] != std::floor(v[2])) {
      throw ConfigError(what + ".geometric must be [start > 0, stop > 0, count >= 1]");
    }
    const auto count = static_cast<std::size_t>(v[2]);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = count == 1 ? v[0]
                          : v[0] * std::pow(v[1] / v[0], static_cast<double>(i) / (count - 1));
    }
    return out;
  }
  throw ConfigError(what + " needs 'list' or 'geometric'");
}

}  // namespace

const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names = {"omega0", "r", "sigma2", "dtau", "lambda", "tau0"};
  return names;
}

RunConfig load_run_config(const std::string& path) {
  return run_config(parse_file(path), false, {});
}

scenarios::EngineOptions load_engine_options(const std::string& path) {
  return engine_options(parse_file(path));
}

SweepConfig load_sweep_config(const std::string& path) {
  const toml::table root = parse_file(path);
  const auto* sw = section(root, "sweep");
  if (!sw) throw ConfigError("missing [sweep] table");
  const toml::node* ax = sw->get("axes");
  if (!ax || !ax->is_table() || ax->as_table()->empty()) {
    throw ConfigError("sweep.axes must be a non-empty table");
  }
  SweepConfig c;
  for (const auto& [k, v] : *ax->as_table()) {
    const std::string key(k.str());
    bool known = false;
    for (const auto& a : axis_names()) known = known || a == key;
    if (!known) throw ConfigError("unknown sweep axis '" + key + "'");
  }
  std::vector<std::string> present;
  for (const auto& name : axis_names()) {
    if (const auto* n = ax->as_table()->get(name)) {
      auto values = axis_values(*n, name);
      if (values.empty()) throw ConfigError("sweep.axes." + name + " is empty");
      c.axes.emplace_back(name, std::move(values));
      present.push_back(name);
    }
  }
  if (auto v = number(*sw, "max_points")) {
    if (!(*v >= 1.0)) throw ConfigError("sweep.max_points must be >= 1");
    c.max_points = static_cast<std::size_t>(*v);
  }
  if (const auto* n = sw->get("threads")) {
    auto i = n->value<int64_t>();
    if (!i || *i < 0) throw ConfigError("sweep.threads must be a non-negative integer");
    c.threads = static_cast<unsigned>(*i);
  }
  c.base = run_config(root, true, present);
  double total = 1.0;
  for (const auto& a : c.axes) total *= static_cast<double>(a.second.size());
  if (total > static_cast<double>(c.max_points)) {
    throw ConfigError("sweep grid has " + std::to_string(static_cast<long long>(total)) +
                      " points, above max_points");
  }
  return c;
}

std::size_t grid_size(const SweepConfig& cfg) {
  std::size_t n = 1;
  for (const auto& a : cfg.axes) n *= a.second.size();
  return n;
}

scenarios::SystemParams grid_point(const SweepConfig& cfg, std::size_t k) {
  scenarios::SystemParams p = cfg.base.params;
  double dtau = p.dtau();
  for (std::size_t i = cfg.axes.size(); i-- > 0;) {
    const auto& [name, values] = cfg.axes[i];
    const double v = values[k % values.size()];
    k /= values.size();
    if (name == "omega0") p.omega0 = v;
    else if (name == "r") p.r = v;
    else if (name == "sigma2") p.sigma2 = v;
    else if (name == "dtau") dtau = v;
    else if (name == "lambda") p.lambda = v;
    else if (name == "tau0") p.tau0 = v;
  }
  p.tau = p.tau0 + dtau;
  return p;
}

}  // namespace fermi::cli
