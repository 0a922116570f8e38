#include "qtp/fem.hpp"

#include "qtp/error.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <string>

namespace qtp {

std::vector<Point> element_gradients(const DiscreteField& u) {
    const Mesh& mesh = u.mesh();
    std::vector<Point> out(mesh.element_count(), Point{0.0, 0.0});
    const int nv = mesh.vertices_per_element();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (!(mesh.measures[e] > 0.0)) throw MeshError("degenerate element " + std::to_string(e));
        const auto& el = mesh.elements[e];
        const auto& grads = mesh.basis_gradients[e];
        for (int i = 0; i < nv; ++i) {
            out[e][0] += u[el[i]] * grads[i][0];
            out[e][1] += u[el[i]] * grads[i][1];
        }
    }
    return out;
}

SparseSPDSystem assemble_weighted_laplacian(const Mesh& mesh, std::span<const double> weights) {
    if (weights.size() != mesh.element_count()) {
        throw InvalidParameter("one weight per element required");
    }
    const int nv = mesh.vertices_per_element();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.element_count() * nv * nv);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double w = weights[e];
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw InvalidParameter("non-positive weight on element " + std::to_string(e));
        }
        const auto& el = mesh.elements[e];
        const auto& g = mesh.basis_gradients[e];
        const double c = w * mesh.measures[e];
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) {
                triplets.emplace_back(el[i], el[j], c * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    SparseSPDSystem system;
    system.matrix.resize(n, n);
    system.matrix.setFromTriplets(triplets.begin(), triplets.end());
    system.rhs = Eigen::VectorXd::Zero(n);
    return system;
}

std::vector<double> assemble_load_quadrature(const Mesh& mesh, std::span<const double> f_qp) {
    const auto& rule = quadrature_rule(mesh.dim);
    if (f_qp.size() != mesh.element_count() * rule.size()) {
        throw InvalidParameter("quadrature source has wrong length");
    }
    const int nv = mesh.vertices_per_element();
    std::vector<double> b(mesh.node_count(), 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double c = f_qp[e * rule.size() + q] * rule[q].weight * mesh.measures[e];
            for (int i = 0; i < nv; ++i) b[el[i]] += c * rule[q].lambda[i];
        }
    }
    return b;
}

std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f_nodal) {
    if (f_nodal.size() != mesh.node_count()) throw InvalidParameter("load field has wrong length");
    // The quadrature rules integrate products of two P1 functions exactly.
    const auto& rule = quadrature_rule(mesh.dim);
    const int nv = mesh.vertices_per_element();
    std::vector<double> f_qp(mesh.element_count() * rule.size());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double s = 0.0;
            for (int i = 0; i < nv; ++i) s += rule[q].lambda[i] * f_nodal[mesh.elements[e][i]];
            f_qp[e * rule.size() + q] = s;
        }
    }
    return assemble_load_quadrature(mesh, f_qp);
}

void constrain(SparseSPDSystem& system, std::span<const int> nodes, std::span<const double> values) {
    if (nodes.size() != values.size()) throw InvalidParameter("constraint size mismatch");
    system.constrained.assign(nodes.begin(), nodes.end());
    system.constrained_values.assign(values.begin(), values.end());
}

std::vector<double> solve_spd(const SparseSPDSystem& system, double tol,
                              std::optional<std::span<const double>> initial_guess) {
    const Eigen::Index n = system.matrix.rows();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<Eigen::Index> free_index(static_cast<std::size_t>(n), 0);
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < system.constrained.size(); ++k) {
        fixed[system.constrained[k]] = 1;
        x[system.constrained[k]] = system.constrained_values[k];
    }
    Eigen::Index nfree = 0;
    for (Eigen::Index i = 0; i < n; ++i) free_index[i] = fixed[i] ? -1 : nfree++;
    if (nfree == 0) return x;

    Eigen::VectorXd b(nfree);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!fixed[i]) b[free_index[i]] = system.rhs[i];
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(system.matrix.nonZeros()));
    for (Eigen::Index col = 0; col < system.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
            const Eigen::Index row = it.row();
            if (fixed[row]) continue;
            if (fixed[col]) {
                b[free_index[row]] -= it.value() * x[col];
            } else {
                triplets.emplace_back(free_index[row], free_index[col], it.value());
            }
        }
    }
    Eigen::SparseMatrix<double> K(nfree, nfree);
    K.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * nfree));
    cg.compute(K);
    Eigen::VectorXd sol;
    if (initial_guess) {
        Eigen::VectorXd x0(nfree);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!fixed[i]) x0[free_index[i]] = (*initial_guess)[i];
        }
        sol = cg.solveWithGuess(b, x0);
    } else {
        sol = cg.solve(b);
    }
    if (cg.info() != Eigen::Success) {
        throw SolverError("conjugate gradients did not converge", cg.error());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!fixed[i]) x[i] = sol[free_index[i]];
    }
    return x;
}

bool Ball::contains(const Point& x, double tol) const {
    return distance(x, center) <= radius + tol;
}

double gradient_energy(const DiscreteField& u, double p, std::optional<Ball> region) {
    if (!(p >= 1.0)) throw InvalidParameter("p must be at least 1");
    const Mesh& mesh = u.mesh();
    const auto grads = element_gradients(u);
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (region && !region->contains(mesh.barycenter(e))) continue;
        sum += std::pow(norm(grads[e]), p) * mesh.measures[e];
    }
    return sum;
}

double lp_gradient_norm(const DiscreteField& u, double p, std::optional<Ball> region) {
    return std::pow(gradient_energy(u, p, region), 1.0 / p);
}

double lp_norm(const DiscreteField& u, double p) {
    if (!(p >= 1.0)) throw InvalidParameter("p must be at least 1");
    const Mesh& mesh = u.mesh();
    const auto& rule = quadrature_rule(mesh.dim);
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        for (const auto& q : rule) {
            sum += q.weight * mesh.measures[e] * std::pow(std::abs(u.at(e, q.lambda)), p);
        }
    }
    return std::pow(sum, 1.0 / p);
}

double sup_on_ball(const DiscreteField& u, const Point& center, double radius) {
    const Mesh& mesh = u.mesh();
    const Ball ball{center, radius};
    double best = -1.0;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (ball.contains(mesh.nodes[i])) best = std::max(best, std::abs(u[i]));
    }
    if (best < 0.0) throw MeshError("ball under-resolved");
    return best;
}

}  // namespace qtp
