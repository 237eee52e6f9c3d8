#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fermi/asymptotics.hpp"
#include "fermi/greens.hpp"
#include "fermi/quadrature.hpp"
#include "fermi/scenarios.hpp"
#include "fermi/specfun.hpp"
#include "fermi/verification.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

namespace g = fermi::greens;
namespace q = fermi::quadrature;
namespace s = fermi::scenarios;
namespace v = fermi::verification;

g::SpacetimeInterval interval(double dt, double r) { return {dt, r}; }

g::Regularization at_eps(double eps) {
  g::Regularization reg;
  reg.eps = eps;
  return reg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-qubit Fermi-problem transition probabilities in a disordered medium.";
  m.attr("__version__") = FERMI_VERSION;

  py::register_exception<g::OnLightConeError>(m, "OnLightConeError", PyExc_ValueError);

  // specfun
  m.def("sin_integral", &fermi::specfun::sin_integral, "x"_a);
  m.def("cos_integral", &fermi::specfun::cos_integral, "x"_a);
  m.def("trig_auxiliary", [](double x) {
    const auto a = fermi::specfun::trig_auxiliary(x);
    return py::make_tuple(a.f, a.g);
  }, "x"_a, "Auxiliary functions (f, g) of Si and Ci.");

  // greens
  py::class_<g::Regularization>(m, "Regularization")
      .def(py::init<>())
      .def_readwrite("eps", &g::Regularization::eps)
      .def_readwrite("schedule", &g::Regularization::schedule)
      .def_readwrite("extrapolation_order", &g::Regularization::extrapolation_order)
      .def("validate", &g::Regularization::validate);

  py::class_<g::DeltaTerm>(m, "DeltaTerm")
      .def_readonly("location", &g::DeltaTerm::location)
      .def_readonly("weight", &g::DeltaTerm::weight)
      .def("__repr__", [](const g::DeltaTerm& d) {
        return "DeltaTerm(location=" + std::to_string(d.location) + ")";
      });

  py::class_<g::KernelValue>(m, "KernelValue")
      .def_readonly("smooth", &g::KernelValue::smooth)
      .def_readonly("deltas", &g::KernelValue::deltas);

  m.def("feynman_free", [](double dt, double r, double eps) {
    return g::feynman_free_ieps(interval(dt, r), at_eps(eps));
  }, "dt"_a, "r"_a, "eps"_a = 1e-3);
  m.def("feynman_free_split", [](double dt, double r) {
    return g::feynman_free_split(interval(dt, r));
  }, "dt"_a, "r"_a);
  m.def("wightman_free", [](double dt, double r, double eps) {
    return g::wightman_free(interval(dt, r), at_eps(eps));
  }, "dt"_a, "r"_a, "eps"_a = 1e-3);
  m.def("wightman_free_split", [](double dt, double r) {
    return g::wightman_free_split(interval(dt, r));
  }, "dt"_a, "r"_a);
  m.def("disorder_F", [](double dt, double r) { return g::disorder_F(interval(dt, r)); },
        "dt"_a, "r"_a);
  m.def("disorder_I", [](double dt, double r, double sigma2, double eps) {
    return g::disorder_I(interval(dt, r), at_eps(eps), {sigma2});
  }, "dt"_a, "r"_a, "sigma2"_a, "eps"_a = 1e-3);
  m.def("disorder_I_plus", [](double dt, double r, double sigma2, double eps) {
    return g::disorder_I_plus(interval(dt, r), at_eps(eps), {sigma2});
  }, "dt"_a, "r"_a, "sigma2"_a, "eps"_a = 1e-3);
  m.def("disorder_I_spacelike", [](double dt, double r, double sigma2) {
    return g::disorder_I_spacelike(interval(dt, r), {sigma2});
  }, "dt"_a, "r"_a, "sigma2"_a, "eps -> 0 form, |dt| < r.");

  // quadrature
  py::class_<q::QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init<>())
      .def_readwrite("rel_tol", &q::QuadratureSpec::rel_tol)
      .def_readwrite("abs_tol", &q::QuadratureSpec::abs_tol)
      .def_readwrite("max_subdivisions", &q::QuadratureSpec::max_subdivisions)
      .def_readwrite("gauss_nodes", &q::QuadratureSpec::gauss_nodes);

  py::class_<q::IntegralResult>(m, "IntegralResult")
      .def_readonly("value", &q::IntegralResult::value)
      .def_readonly("err_est", &q::IntegralResult::err_est)
      .def_readonly("evaluations", &q::IntegralResult::evaluations)
      .def_readonly("converged", &q::IntegralResult::converged)
      .def_readonly("regulated", &q::IntegralResult::regulated)
      .def("__repr__", [](const q::IntegralResult& r) {
        return "IntegralResult(value=" + py::repr(py::cast(r.value)).cast<std::string>() +
               ", err_est=" + py::repr(py::float_(r.err_est)).cast<std::string>() + ")";
      });

  // scenarios
  py::enum_<s::Scenario>(m, "Scenario")
      .value("PhiF", s::Scenario::PhiF)
      .value("PsiF", s::Scenario::PsiF)
      .value("BigPhiF", s::Scenario::BigPhiF);
  py::enum_<s::Regime>(m, "Regime")
      .value("Precursor", s::Regime::Precursor)
      .value("LightCone", s::Regime::LightCone);
  py::enum_<s::IPlusConvention>(m, "IPlusConvention")
      .value("Analytic", s::IPlusConvention::Analytic)
      .value("Restricted", s::IPlusConvention::Restricted);

  py::class_<s::SystemParams>(m, "SystemParams")
      .def(py::init([](double omega0, double r, double lambda_, double tau0, double tau,
                       double sigma2) {
             s::SystemParams p{omega0, r, lambda_, tau0, tau, sigma2};
             p.validate();
             return p;
           }),
           "omega0"_a = 1.0, "r"_a = 1.0, "lambda_"_a = 1.0, "tau0"_a = 0.0, "tau"_a = 1.0,
           "sigma2"_a = 0.0)
      .def_readwrite("omega0", &s::SystemParams::omega0)
      .def_readwrite("r", &s::SystemParams::r)
      .def_readwrite("lambda_", &s::SystemParams::lambda)
      .def_readwrite("tau0", &s::SystemParams::tau0)
      .def_readwrite("tau", &s::SystemParams::tau)
      .def_readwrite("sigma2", &s::SystemParams::sigma2)
      .def_property_readonly("dtau", &s::SystemParams::dtau);

  py::class_<s::EngineOptions>(m, "EngineOptions")
      .def(py::init<>())
      .def_readwrite("reg", &s::EngineOptions::reg)
      .def_readwrite("spec", &s::EngineOptions::spec)
      .def_readwrite("include_r_independent", &s::EngineOptions::include_r_independent)
      .def_readwrite("i_plus", &s::EngineOptions::i_plus);

  py::class_<s::Term>(m, "Term")
      .def_readonly("label", &s::Term::label)
      .def_readonly("value", &s::Term::value)
      .def_readonly("additive", &s::Term::additive)
      .def_readonly("disorder", &s::Term::disorder);

  py::class_<s::ScenarioResult>(m, "ScenarioResult")
      .def_readonly("params", &s::ScenarioResult::params)
      .def_readonly("scenario", &s::ScenarioResult::scenario)
      .def_readonly("with_disorder", &s::ScenarioResult::with_disorder)
      .def_property_readonly("terms", [](const s::ScenarioResult& r) { return r.breakdown.terms; })
      .def_readonly("probability_r_dependent", &s::ScenarioResult::probability_r_dependent)
      .def_readonly("regime", &s::ScenarioResult::regime)
      .def_readonly("wave_zone", &s::ScenarioResult::wave_zone)
      .def_readonly("regulated", &s::ScenarioResult::regulated)
      .def_readonly("converged", &s::ScenarioResult::converged)
      .def_readonly("largest_term", &s::ScenarioResult::largest_term)
      .def("term", [](const s::ScenarioResult& r, const std::string& label) {
        const s::Term* t = r.breakdown.find(label);
        if (!t) throw py::key_error(label);
        return t->value;
      }, "label"_a);

  py::class_<s::Amplitude>(m, "Amplitude")
      .def_readonly("pv", &s::Amplitude::pv)
      .def_readonly("delta", &s::Amplitude::delta)
      .def_readonly("total", &s::Amplitude::total);

  py::class_<s::Crossover>(m, "Crossover")
      .def_readonly("r0", &s::Crossover::r0)
      .def_readonly("found", &s::Crossover::found);

  m.def("evaluate", &s::evaluate, "scenario"_a, "params"_a, "options"_a = s::EngineOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("amplitude_free_A", &s::amplitude_free_A, "params"_a, "spec"_a = q::QuadratureSpec{});
  m.def("disorder_amplitude", &s::disorder_amplitude, "params"_a,
        "options"_a = s::EngineOptions{});
  m.def("find_crossover_radius", &s::find_crossover_radius, "omega0"_a, "sigma2"_a, "dtau"_a,
        "options"_a = s::EngineOptions{}, "r_max_factor"_a = 1e3);

  // asymptotics
  m.def("precursor_closed_form_A", &fermi::asymptotics::precursor_closed_form_A, "omega0"_a,
        "r"_a, "dtau"_a);
  m.def("wave_zone_disorder", &fermi::asymptotics::wave_zone_disorder, "omega0"_a, "sigma2"_a,
        "dtau"_a);
  m.def("disorder_far_field", &fermi::asymptotics::disorder_far_field, "omega0"_a, "sigma2"_a,
        "r"_a, "dtau"_a);

  // verification
  py::class_<v::Criterion>(m, "Criterion")
      .def_readonly("id", &v::Criterion::id)
      .def_readonly("title", &v::Criterion::title)
      .def_readonly("passed", &v::Criterion::passed)
      .def_readonly("measured", &v::Criterion::measured)
      .def_readonly("tolerance", &v::Criterion::tolerance)
      .def_readonly("comparison", &v::Criterion::comparison)
      .def_readonly("detail", &v::Criterion::detail)
      .def("__str__", &v::format_line);
  m.def("suite_names", &v::suite_names);
  m.def("run_criterion", &v::run_criterion, "id"_a, "options"_a = s::EngineOptions{},
        py::call_guard<py::gil_scoped_release>());
}
