#include "qtp/solver.hpp"

#include "qtp/error.hpp"
#include "qtp/fem.hpp"
#include "qtp/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qtp {

void SolveOptions::validate() const {
    if (!(tol_picard > 0.0)) throw InvalidParameter("tol_picard must be positive");
    if (max_picard < 1) throw InvalidParameter("max_picard must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidParameter("damping must lie in (0, 1]");
    if (!(min_damping > 0.0 && min_damping <= damping)) {
        throw InvalidParameter("min_damping must lie in (0, damping]");
    }
    if (!(grad_reg_delta >= 0.0)) throw InvalidParameter("grad_reg_delta must be non-negative");
    if (!(linear_tol > 0.0)) throw InvalidParameter("linear_tol must be positive");
}

namespace {

void require_valid(const ProblemSpec& spec, const Mesh& mesh) {
    const auto violations = validate_spec(spec, mesh);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "spec validation failed: " << violations.front().message;
        if (violations.front().node >= 0) os << " at node " << violations.front().node;
        if (violations.size() > 1) os << " (+" << violations.size() - 1 << " more)";
        throw ValidationError(os.str());
    }
}

struct Linearization {
    std::vector<double> weights;
    std::vector<double> load_qp;
    double energy = 0.0;
};

Linearization linearize(const ProblemSpec& spec, const DiscreteField& u, double eps,
                        double delta) {
    const Mesh& mesh = u.mesh();
    const auto& rule = quadrature_rule(mesh.dim);
    const auto grads = element_gradients(u);
    const PhaseModel model = PhaseModel::mollified(eps);
    Linearization lin;
    lin.weights.resize(mesh.element_count());
    lin.load_qp.resize(mesh.element_count() * rule.size());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        double mean_coefficient = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& lambda = rule[q].lambda;
            const double s = u.at(e, lambda);
            mean_coefficient += rule[q].weight *
                                model.coefficient(spec.A_plus.at(mesh, e, lambda),
                                                  spec.A_minus.at(mesh, e, lambda), spec.p, s);
            lin.load_qp[e * rule.size() + q] = model.source(
                spec.f_plus.at(mesh, e, lambda), spec.f_minus.at(mesh, e, lambda), s);
        }
        const double g2 = grads[e][0] * grads[e][0] + grads[e][1] * grads[e][1];
        const double degenerate =
            spec.p == 2.0 ? 1.0 : std::pow(g2 + delta * delta, 0.5 * (spec.p - 2.0));
        lin.weights[e] = std::max(mean_coefficient * degenerate, kWeightFloor);
        lin.energy += mesh.measures[e] * mean_coefficient * std::pow(std::sqrt(g2), spec.p);
    }
    return lin;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double regularized_energy(const ProblemSpec& spec, const DiscreteField& u, double eps) {
    return linearize(spec, u, eps, 0.0).energy;
}

std::pair<DiscreteField, SolveReport> solve_regularized(
    const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh, double eps, const SolveOptions& opts,
    const std::optional<DiscreteField>& warm_start) {
    if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
    opts.validate();
    require_valid(spec, *mesh);

    SolveReport report;
    report.experimental = spec.p < 2.0;

    std::vector<double> u = spec.g.sample_nodes(*mesh);
    if (warm_start) {
        if (warm_start->size() != mesh->node_count()) {
            throw ValidationError("warm start lives on a different mesh");
        }
        report.warm_start = "field";
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!mesh->is_boundary[i]) u[i] = (*warm_start)[i];
        }
    }
    std::vector<double> boundary_values;
    for (int b : mesh->boundary_nodes) boundary_values.push_back(u[b]);

    double theta = opts.damping;
    int increases = 0;
    int stalled = 0;
    double best_update = std::numeric_limits<double>::infinity();
    double previous_energy = linearize(spec, DiscreteField(mesh, u), eps, 0.0).energy;

    for (int k = 1; k <= opts.max_picard; ++k) {
        const DiscreteField current(mesh, u);
        const Linearization lin = linearize(spec, current, eps, opts.grad_reg_delta);
        SparseSPDSystem system = assemble_weighted_laplacian(*mesh, lin.weights);
        const auto load = assemble_load_quadrature(*mesh, lin.load_qp);
        system.rhs = Eigen::Map<const Eigen::VectorXd>(load.data(), static_cast<Eigen::Index>(load.size()));
        constrain(system, mesh->boundary_nodes, boundary_values);
        const std::vector<double> solved = solve_spd(system, opts.linear_tol, std::span<const double>(u));

        double update = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double next = (1.0 - theta) * u[i] + theta * solved[i];
            update = std::max(update, std::abs(next - u[i]));
            u[i] = next;
        }
        const double scale = max_abs(u);
        const double relative_update = scale > 0.0 ? update / scale : update;

        const DiscreteField next_field(mesh, u);
        const double energy = linearize(spec, next_field, eps, 0.0).energy;
        const double residual =
            residual_parts(spec, next_field, PhaseModel::mollified(eps)).relative_interior_norm(*mesh);
        report.iterations = k;
        report.energy_history.push_back(energy);
        report.residual_history.push_back(residual);
        report.damping_history.push_back(theta);
        report.final_residual = residual;

        if (relative_update < opts.tol_picard) {
            report.converged = true;
            break;
        }
        increases = energy > previous_energy ? increases + 1 : 0;
        previous_energy = energy;
        // A two-cycle alternates energy up and down, so also damp when the update stalls.
        if (relative_update < best_update) {
            best_update = relative_update;
            stalled = 0;
        } else {
            ++stalled;
        }
        if (increases >= 5 || stalled >= 10) {
            theta = std::max(0.5 * theta, opts.min_damping);
            increases = 0;
            stalled = 0;
            best_update = relative_update;
        }
    }

    DiscreteField result(mesh, std::move(u));
    report.grad_norm = lp_gradient_norm(result, spec.p);
    if (!report.converged) {
        throw PicardError("Picard iteration did not converge in " +
                              std::to_string(opts.max_picard) + " steps",
                          report);
    }
    return {std::move(result), std::move(report)};
}

std::pair<DiscreteField, SolveReport> solve_regularized(
    const ProblemSpec& spec, double eps, const SolveOptions& opts,
    const std::optional<DiscreteField>& warm_start) {
    auto mesh = warm_start ? warm_start->mesh_ptr()
                           : std::make_shared<const Mesh>(build_mesh(spec.domain));
    return solve_regularized(spec, mesh, eps, opts, warm_start);
}

std::pair<DiscreteField, DiscreteField> split_fields(double eps, const DiscreteField& u) {
    std::vector<double> plus(u.size()), minus(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        plus[i] = mollifier::Psi_plus(eps, u[i]);
        minus[i] = mollifier::Psi_minus(eps, u[i]);
    }
    return {DiscreteField(u.mesh_ptr(), std::move(plus)), DiscreteField(u.mesh_ptr(), std::move(minus))};
}

ContinuationReport epsilon_continuation(const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh,
                                        const std::vector<double>& schedule,
                                        const SolveOptions& opts) {
    if (schedule.empty()) throw InvalidParameter("empty eps schedule");
    for (std::size_t j = 1; j < schedule.size(); ++j) {
        if (!(schedule[j] < schedule[j - 1])) {
            throw InvalidParameter("eps schedule must be strictly decreasing");
        }
    }
    ContinuationReport out;
    std::optional<DiscreteField> warm;
    for (std::size_t j = 0; j < schedule.size(); ++j) {
        const double eps = schedule[j];
        try {
            auto [u, report] = solve_regularized(spec, mesh, eps, opts, warm);
            warm = u;
            out.fields.push_back(std::move(u));
            out.reports.push_back(std::move(report));
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "level " << j << " (eps = " << eps << ") failed: " << e.what();
            throw SolverError(os.str(), e.final_residual());
        }
        const DiscreteField& u = out.fields.back();
        out.eps_values.push_back(eps);
        out.grad_norms.push_back(out.reports.back().grad_norm);

        const auto [U_plus, U_minus] = split_fields(eps, u);
        double split = 0.0, plus_gap = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            split = std::max(split, std::abs(u[i] - (U_plus[i] - U_minus[i])));
            plus_gap = std::max(plus_gap, std::abs(U_plus[i] - std::max(u[i], 0.0)));
        }
        out.split_checks.push_back(split);
        out.plus_part_gaps.push_back(plus_gap);

        if (j > 0) {
            const DiscreteField& prev = out.fields[j - 1];
            std::vector<double> diff(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) diff[i] = prev[i] - u[i];
            out.cauchy_gaps.push_back(lp_norm(DiscreteField(mesh, std::move(diff)), spec.p));
        }
    }
    if (out.grad_norms.size() >= 2) {
        const double fitted = std::max(out.grad_norms[0], out.grad_norms[1]);
        const double peak = *std::max_element(out.grad_norms.begin(), out.grad_norms.end());
        out.uniform_bound_ok = peak <= (1.0 + 1e-6) * fitted * 2.0;
    }
    return out;
}

ContinuationReport epsilon_continuation(const ProblemSpec& spec, const std::vector<double>& schedule,
                                        const SolveOptions& opts) {
    return epsilon_continuation(spec, std::make_shared<const Mesh>(build_mesh(spec.domain)),
                                schedule, opts);
}

Oracle1D solve_oracle_1d(double A_plus, double A_minus, double p) {
    if (!(A_plus > 0.0 && A_minus > 0.0)) throw InvalidParameter("coefficients must be positive");
    if (!(p > 1.0)) throw InvalidParameter("p must exceed 1");
    const double rho = std::pow(A_minus / A_plus, 1.0 / (p - 1.0));
    const double x0 = (rho - 1.0) / (rho + 1.0);
    return {x0, 1.0 / (1.0 - x0), 1.0 / (1.0 + x0)};
}

namespace {

/// Evaluates a data field at an arbitrary point of the mesh it was given on.
ScalarField::Evaluator pointwise(const ScalarField& field, std::shared_ptr<const PointLocator> locator) {
    if (!field.is_nodal()) {
        return [field](const Point& x) { return field.at_point(x); };
    }
    return [field, locator](const Point& x) {
        const auto loc = locator->locate(x);
        if (!loc) throw MeshError("point outside the source mesh");
        return field.at(locator->mesh(), static_cast<std::size_t>(loc->element), loc->lambda);
    };
}

}  // namespace

RescaledProblem rescale_solution(const ProblemSpec& spec, const DiscreteField& u, double Theta,
                                 double Phi, double Psi, const Point& x0) {
    if (!(Theta > 0.0)) throw InvalidParameter("Theta must be positive");
    if (!(Phi > 0.0)) throw InvalidParameter("Phi must be positive");
    const Mesh& source = u.mesh();
    const double tol = 1e-12;
    switch (source.kind) {
        case DomainKind::Interval:
            if (x0[0] - Theta < -1.0 - tol || x0[0] + Theta > 1.0 + tol) {
                throw InvalidParameter("ball leaves the domain");
            }
            break;
        case DomainKind::UnitDisc:
            if (norm(x0) + Theta > 1.0 + tol) throw InvalidParameter("ball leaves the domain");
            break;
        case DomainKind::UnitSquare:
            throw InvalidParameter("rescaling to the unit ball needs an interval or disc domain");
    }

    auto locator = std::make_shared<const PointLocator>(u.mesh_ptr());
    auto target = std::make_shared<const Mesh>(build_mesh(spec.domain));
    const auto map = [Theta, x0](const Point& y) {
        return Point{Theta * y[0] + x0[0], Theta * y[1] + x0[1]};
    };

    std::vector<double> w(target->node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Point& y = target->nodes[i];
        auto loc = locator->locate(map(y));
        if (!loc) {
            // Chords of the polygonal disc boundary sit slightly inside the unit circle.
            const double shrink = 1.0 - 1e-9;
            loc = locator->locate(map(Point{shrink * y[0], shrink * y[1]}));
        }
        if (!loc) throw MeshError("rescaled node falls outside the source mesh");
        w[i] = Phi * u.at(static_cast<std::size_t>(loc->element), loc->lambda) + Psi;
    }

    RescaledProblem out{DiscreteField(target, w), spec};
    const double source_scale = std::pow(Phi, spec.p - 1.0) * std::pow(Theta, spec.p);
    const auto compose = [&](const ScalarField& field, double factor, const std::string& label) {
        auto f = pointwise(field, locator);
        return ScalarField::function(
            [f, map, factor](const Point& y) { return factor * f(map(y)); }, label);
    };
    out.spec.A_plus = compose(spec.A_plus, 1.0, "rescaled A_plus");
    out.spec.A_minus = compose(spec.A_minus, 1.0, "rescaled A_minus");
    out.spec.f_plus = compose(spec.f_plus, source_scale, "rescaled f_plus");
    out.spec.f_minus = compose(spec.f_minus, source_scale, "rescaled f_minus");
    out.spec.g = ScalarField::nodal(std::move(w));
    return out;
}

}  // namespace qtp
