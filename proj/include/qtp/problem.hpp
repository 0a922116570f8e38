#pragma once

#include "qtp/field.hpp"
#include "qtp/mesh.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qtp {

/// Data of -div(A(x,u)|grad u|^{p-2} grad u) = f(x,u) with Dirichlet data g.
struct ProblemSpec {
    double p = 2.0;
    double mu = 0.5;
    ScalarField A_plus = ScalarField::constant(1.0);
    ScalarField A_minus = ScalarField::constant(1.0);
    ScalarField f_plus = ScalarField::constant(0.0);
    ScalarField f_minus = ScalarField::constant(0.0);
    ScalarField g = ScalarField::constant(0.0);
    DomainDescriptor domain;
};

/// A_plus on {s > 0}, A_minus on {s <= 0}.
double eval_broken_coefficient(double A_plus, double A_minus, double s);
/// f_plus on {s > 0}, f_minus on {s <= 0}.
double eval_broken_source(double f_plus, double f_minus, double s);

struct Violation {
    std::string message;
    int node = -1;  ///< offending node, or -1 for global violations
};

/// Checks p > 1, 0 < mu < 1, mu <= A_{+,-} <= 1/mu and finiteness of all data at every node.
std::vector<Violation> validate_spec(const ProblemSpec& spec, const Mesh& mesh);
std::vector<Violation> validate_spec(const ProblemSpec& spec);

/// How the phase indicators are evaluated: sharp (the original equation) or eps-ramp smoothed.
struct PhaseModel {
    std::optional<double> eps;

    static PhaseModel sharp() { return {}; }
    static PhaseModel mollified(double e) { return {e}; }

    double coefficient(double A_plus, double A_minus, double p, double s) const;
    double source(double f_plus, double f_minus, double s) const;
};

/// Per-node weak-form contributions against every hat function.
///
/// flux[i] = int A(x,u)|grad u|^{p-2} grad u . grad phi_i and load[i] = int f(x,u) phi_i, each
/// by the fixed element quadrature with the phase chosen from u at the quadrature point.
struct ResidualParts {
    std::vector<double> flux;
    std::vector<double> load;

    double at(std::size_t i) const { return flux[i] - load[i]; }
    /// max over interior nodes of |flux - load|, divided by max(|flux|_inf, |load|_inf), or 0.
    double relative_interior_norm(const Mesh& mesh) const;
};

ResidualParts residual_parts(const ProblemSpec& spec, const DiscreteField& u,
                             const PhaseModel& model = PhaseModel::sharp());

/// int A(x,u)|grad u|^{p-2} grad u . grad phi - int f(x,u) phi.
/// Throws ValidationError("test function not in W_0") if phi is nonzero on the boundary.
double weak_residual(const ProblemSpec& spec, const DiscreteField& u, const DiscreteField& phi,
                     const PhaseModel& model = PhaseModel::sharp());

// JSON interchange. Fields are {"const": v}, {"expr": name} or {"nodal": [...]}.
ScalarField scalar_field_from_json(const nlohmann::json& j);
nlohmann::json scalar_field_to_json(const ScalarField& f);
ProblemSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ProblemSpec& spec);

}  // namespace qtp
