#include "qtp/diagnostics.hpp"
#include "qtp/error.hpp"
#include "qtp/mollifier.hpp"
#include "qtp/problem.hpp"
#include "qtp/solver.hpp"
#include "qtp/tab.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qtp;
using namespace qtp::mollifier;

namespace {

// Fields cross the boundary as (nodes, values) lists; meshes stay on the C++ side.
struct PyField {
    DiscreteField field;
    std::vector<Point> nodes() const { return field.mesh().nodes; }
    std::vector<double> values() const { return {field.values().begin(), field.values().end()}; }
};

ProblemSpec spec_from_dict(const py::dict& d) {
    const auto json_mod = py::module_::import("json");
    const std::string text = py::str(json_mod.attr("dumps")(d));
    return spec_from_json(nlohmann::json::parse(text));
}

SolveOptions options_from(int max_picard, double tol_picard) {
    SolveOptions o;
    o.max_picard = max_picard;
    o.tol_picard = tol_picard;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-phase quasilinear transmission problems: solver and diagnostics";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("psi_plus", &psi_plus, py::arg("eps"), py::arg("t"));
    m.def("psi_minus", &psi_minus, py::arg("eps"), py::arg("t"));
    m.def("Psi_plus", &Psi_plus, py::arg("eps"), py::arg("t"));
    m.def("Psi_minus", &Psi_minus, py::arg("eps"), py::arg("t"));
    m.def("a_eps", &a_eps, py::arg("eps"), py::arg("A_plus"), py::arg("A_minus"), py::arg("p"), py::arg("s"));
    m.def("geometric_schedule", [](double eps0, int levels) { return geometric_schedule({eps0, levels}); },
          py::arg("eps0") = 0.5, py::arg("levels") = 8);

    py::class_<Oracle1D>(m, "Oracle1D")
        .def_readonly("x0", &Oracle1D::x0)
        .def_readonly("slope_plus", &Oracle1D::slope_plus)
        .def_readonly("slope_minus", &Oracle1D::slope_minus)
        .def("__call__", &Oracle1D::operator());
    m.def("solve_oracle_1d", &solve_oracle_1d, py::arg("A_plus"), py::arg("A_minus"), py::arg("p"));

    py::class_<PyField>(m, "Field")
        .def_property_readonly("nodes", &PyField::nodes)
        .def_property_readonly("values", &PyField::values)
        .def("__len__", [](const PyField& f) { return f.field.size(); });

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("grad_norm", &SolveReport::grad_norm)
        .def_readonly("final_residual", &SolveReport::final_residual)
        .def_readonly("energy_history", &SolveReport::energy_history)
        .def_readonly("residual_history", &SolveReport::residual_history);

    m.def("validate_spec", [](const py::dict& spec) {
            std::vector<std::string> out;
            for (const auto& v : validate_spec(spec_from_dict(spec))) out.push_back(v.message);
            return out;
        }, py::arg("spec"));

    m.def("solve", [](const py::dict& spec, double eps, int max_picard, double tol_picard) {
            auto [u, report] = solve_regularized(spec_from_dict(spec), eps, options_from(max_picard, tol_picard));
            return std::make_pair(PyField{std::move(u)}, std::move(report));
        }, py::arg("spec"), py::arg("eps"), py::arg("max_picard") = 200, py::arg("tol_picard") = 1e-8);

    m.def("continuation", [](const py::dict& spec, const std::vector<double>& schedule, int max_picard) {
            const auto c = epsilon_continuation(spec_from_dict(spec), schedule, options_from(max_picard, 1e-8));
            py::dict out;
            out["eps"] = c.eps_values;
            out["cauchy_gaps"] = c.cauchy_gaps;
            out["split_checks"] = c.split_checks;
            out["plus_part_gaps"] = c.plus_part_gaps;
            out["grad_norms"] = c.grad_norms;
            out["field"] = PyField{c.fields.back()};
            return out;
        }, py::arg("spec"), py::arg("schedule"), py::arg("max_picard") = 200);

    m.def("apply_tab", [](double a, double b, const PyField& u) { return PyField{apply_tab({a, b}, u.field)}; },
          py::arg("a"), py::arg("b"), py::arg("u"));
    m.def("invert_tab", [](double a, double b, const PyField& v) { return PyField{invert_tab({a, b}, v.field)}; },
          py::arg("a"), py::arg("b"), py::arg("v"));
    m.def("monotonicity_gap", &monotonicity_gap, py::arg("v1"), py::arg("v2"), py::arg("p"));

    py::class_<DyadicProfile>(m, "DyadicProfile")
        .def_readonly("radii", &DyadicProfile::radii)
        .def_readonly("sups", &DyadicProfile::sups)
        .def_readonly("fitted_alpha", &DyadicProfile::fitted_alpha)
        .def_readonly("well_resolved", &DyadicProfile::well_resolved);
    m.def("dyadic_decay_profile", [](const PyField& u, double R0, int k_max, const Point& center) {
            DyadicConfig cfg;
            cfg.R0 = R0;
            cfg.k_max = k_max;
            cfg.center = center;
            return dyadic_decay_profile(u.field, cfg);
        }, py::arg("u"), py::arg("R0") = 0.5, py::arg("k_max") = 5, py::arg("center") = Point{0.0, 0.0});
    m.def("nearest_zero", [](const PyField& u, const Point& near) { return nearest_zero(u.field, near); },
          py::arg("u"), py::arg("near") = Point{0.0, 0.0});
}
