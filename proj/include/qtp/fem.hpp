#pragma once

#include "qtp/field.hpp"
#include "qtp/mesh.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <vector>

namespace qtp {

/// Weight floor keeping the Picard stiffness positive definite under degeneracy.
inline constexpr double kWeightFloor = 1e-12;

/// Constant gradient of a P1 field on each element. Throws MeshError on degenerate elements.
std::vector<Point> element_gradients(const DiscreteField& u);

/// Symmetric stiffness matrix with Dirichlet rows recorded separately.
struct SparseSPDSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<int> constrained;
    std::vector<double> constrained_values;
};

/// Stiffness of -div(w grad u) with one weight per element. Throws InvalidParameter on a
/// non-positive or non-finite weight. The returned system has a zero right-hand side and no
/// constraints.
SparseSPDSystem assemble_weighted_laplacian(const Mesh& mesh, std::span<const double> weights);

/// Exact P1 load vector int f_h phi_i of a nodal field f_h.
std::vector<double> assemble_load(const Mesh& mesh, std::span<const double> f_nodal);

/// Load vector from source values given at the quadrature points of every element
/// (row-major: element, then quadrature point).
std::vector<double> assemble_load_quadrature(const Mesh& mesh, std::span<const double> f_qp);

/// Sets Dirichlet values on the given nodes.
void constrain(SparseSPDSystem& system, std::span<const int> nodes, std::span<const double> values);

/// Jacobi-preconditioned conjugate gradients on the unconstrained subsystem.
///
/// Returns nodal values with constrained entries set to their prescribed values. Throws
/// SolverError carrying the final relative residual when the iteration cap is hit.
std::vector<double> solve_spd(const SparseSPDSystem& system, double tol = 1e-10,
                              std::optional<std::span<const double>> initial_guess = std::nullopt);

/// Ball used to restrict integrals and suprema.
struct Ball {
    Point center{0.0, 0.0};
    double radius = 1.0;

    bool contains(const Point& x, double tol = 1e-12) const;
};

/// (sum_e |grad u|^p |e|)^(1/p), optionally over elements whose barycenter lies in the ball.
double lp_gradient_norm(const DiscreteField& u, double p, std::optional<Ball> region = std::nullopt);

/// int |grad u|^p over the element selection, no root taken.
double gradient_energy(const DiscreteField& u, double p, std::optional<Ball> region = std::nullopt);

/// (int |u|^p)^(1/p) by the element quadrature.
double lp_norm(const DiscreteField& u, double p);

/// max |u| over nodes inside the closed ball. Throws MeshError("ball under-resolved") when the
/// ball holds no node.
double sup_on_ball(const DiscreteField& u, const Point& center, double radius);

}  // namespace qtp
