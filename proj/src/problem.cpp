#include "qtp/problem.hpp"

#include "qtp/error.hpp"
#include "qtp/mollifier.hpp"

#include <algorithm>
#include <cmath>

namespace qtp {

double eval_broken_coefficient(double A_plus, double A_minus, double s) {
    return s > 0.0 ? A_plus : A_minus;
}

double eval_broken_source(double f_plus, double f_minus, double s) {
    return s > 0.0 ? f_plus : f_minus;
}

double PhaseModel::coefficient(double A_plus, double A_minus, double p, double s) const {
    if (eps) return mollifier::a_eps(*eps, A_plus, A_minus, p, s);
    return eval_broken_coefficient(A_plus, A_minus, s);
}

double PhaseModel::source(double f_plus, double f_minus, double s) const {
    if (eps) return mollifier::f_eps(*eps, f_plus, f_minus, s);
    return eval_broken_source(f_plus, f_minus, s);
}

std::vector<Violation> validate_spec(const ProblemSpec& spec, const Mesh& mesh) {
    std::vector<Violation> out;
    if (!(spec.p > 1.0) || !std::isfinite(spec.p)) {
        out.push_back({"p must exceed 1", -1});
    }
    if (!(spec.mu > 0.0 && spec.mu < 1.0)) {
        out.push_back({"mu must lie in (0, 1)", -1});
        return out;
    }
    const double lo = spec.mu;
    const double hi = 1.0 / spec.mu;
    const auto check_coefficient = [&](const ScalarField& field, const char* name) {
        for (std::size_t i = 0; i < mesh.node_count(); ++i) {
            const double a = field.at_node(mesh, i);
            if (!std::isfinite(a) || a < lo || a > hi) {
                out.push_back({std::string(name) + " outside [mu, 1/mu]", static_cast<int>(i)});
            }
        }
    };
    const auto check_finite = [&](const ScalarField& field, const char* name,
                                  bool boundary_only) {
        for (std::size_t i = 0; i < mesh.node_count(); ++i) {
            if (boundary_only && !mesh.is_boundary[i]) continue;
            if (!std::isfinite(field.at_node(mesh, i))) {
                out.push_back({std::string(name) + " not finite", static_cast<int>(i)});
            }
        }
    };
    try {
        check_coefficient(spec.A_plus, "A_plus");
        check_coefficient(spec.A_minus, "A_minus");
        check_finite(spec.f_plus, "f_plus", false);
        check_finite(spec.f_minus, "f_minus", false);
        check_finite(spec.g, "g", true);
    } catch (const ValidationError& e) {
        out.push_back({e.what(), -1});
    }
    return out;
}

std::vector<Violation> validate_spec(const ProblemSpec& spec) {
    return validate_spec(spec, build_mesh(spec.domain));
}

double ResidualParts::relative_interior_norm(const Mesh& mesh) const {
    double r = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < flux.size(); ++i) {
        scale = std::max({scale, std::abs(flux[i]), std::abs(load[i])});
        if (!mesh.is_boundary[i]) r = std::max(r, std::abs(flux[i] - load[i]));
    }
    return scale > 0.0 ? r / scale : 0.0;
}

ResidualParts residual_parts(const ProblemSpec& spec, const DiscreteField& u,
                             const PhaseModel& model) {
    const Mesh& mesh = u.mesh();
    const auto& rule = quadrature_rule(mesh.dim);
    const int nv = mesh.vertices_per_element();
    ResidualParts parts{std::vector<double>(mesh.node_count(), 0.0),
                        std::vector<double>(mesh.node_count(), 0.0)};

    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const auto& grads = mesh.basis_gradients[e];
        Point grad{0.0, 0.0};
        for (int i = 0; i < nv; ++i) {
            grad[0] += u[el[i]] * grads[i][0];
            grad[1] += u[el[i]] * grads[i][1];
        }
        const double gnorm = norm(grad);

        double mean_coefficient = 0.0;
        for (const auto& q : rule) {
            const double s = u.at(e, q.lambda);
            const double Ap = spec.A_plus.at(mesh, e, q.lambda);
            const double Am = spec.A_minus.at(mesh, e, q.lambda);
            mean_coefficient += q.weight * model.coefficient(Ap, Am, spec.p, s);

            const double fp = spec.f_plus.at(mesh, e, q.lambda);
            const double fm = spec.f_minus.at(mesh, e, q.lambda);
            const double fq = model.source(fp, fm, s) * q.weight * mesh.measures[e];
            for (int i = 0; i < nv; ++i) parts.load[el[i]] += fq * q.lambda[i];
        }

        if (gnorm == 0.0) continue;
        const double c = mesh.measures[e] * mean_coefficient * std::pow(gnorm, spec.p - 2.0);
        for (int i = 0; i < nv; ++i) {
            parts.flux[el[i]] += c * (grad[0] * grads[i][0] + grad[1] * grads[i][1]);
        }
    }
    return parts;
}

double weak_residual(const ProblemSpec& spec, const DiscreteField& u, const DiscreteField& phi,
                     const PhaseModel& model) {
    if (phi.size() != u.size()) throw ValidationError("test function on a different mesh");
    for (int b : u.mesh().boundary_nodes) {
        if (phi[b] != 0.0) throw ValidationError("test function not in W_0");
    }
    const ResidualParts parts = residual_parts(spec, u, model);
    double r = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) r += parts.at(i) * phi[i];
    return r;
}

ScalarField scalar_field_from_json(const nlohmann::json& j) {
    if (j.is_number()) return ScalarField::constant(j.get<double>());
    if (!j.is_object()) throw ValidationError("field must be an object or a number");
    try {
        if (j.contains("const")) return ScalarField::constant(j.at("const").get<double>());
        if (j.contains("expr")) return ScalarField::expression(j.at("expr").get<std::string>());
        if (j.contains("nodal")) return ScalarField::nodal(j.at("nodal").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed field: ") + e.what());
    }
    throw ValidationError("field needs one of const, expr, nodal");
}

nlohmann::json scalar_field_to_json(const ScalarField& f) {
    if (auto c = f.constant_value()) return {{"const", *c}};
    if (f.is_nodal()) return {{"nodal", f.nodal_values()}};
    // Only built-in expressions round-trip; user callbacks have no serial form.
    ScalarField::expression(f.label());
    return {{"expr", f.label()}};
}

ProblemSpec spec_from_json(const nlohmann::json& j) {
    try {
        ProblemSpec s;
        s.p = j.at("p").get<double>();
        s.mu = j.at("mu").get<double>();
        const auto& d = j.at("domain");
        s.domain.kind = domain_kind_from_string(d.at("kind").get<std::string>());
        s.domain.resolution = d.at("resolution").get<int>();
        const auto field_or = [&j](const char* key, double fallback) {
            return j.contains(key) ? scalar_field_from_json(j.at(key))
                                   : ScalarField::constant(fallback);
        };
        s.A_plus = field_or("A_plus", 1.0);
        s.A_minus = field_or("A_minus", 1.0);
        s.f_plus = field_or("f_plus", 0.0);
        s.f_minus = field_or("f_minus", 0.0);
        s.g = field_or("g", 0.0);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed problem spec: ") + e.what());
    }
}

nlohmann::json spec_to_json(const ProblemSpec& spec) {
    return {
        {"p", spec.p},
        {"mu", spec.mu},
        {"domain", {{"kind", to_string(spec.domain.kind)}, {"resolution", spec.domain.resolution}}},
        {"A_plus", scalar_field_to_json(spec.A_plus)},
        {"A_minus", scalar_field_to_json(spec.A_minus)},
        {"f_plus", scalar_field_to_json(spec.f_plus)},
        {"f_minus", scalar_field_to_json(spec.f_minus)},
        {"g", scalar_field_to_json(spec.g)},
    };
}

}  // namespace qtp
