#include "qtp/error.hpp"
#include "qtp/fem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qtp;

namespace {

std::shared_ptr<const Mesh> mesh_of(DomainKind kind, int n) {
    return std::make_shared<const Mesh>(build_mesh({kind, n}));
}

}  // namespace

TEST(Fem, ElementGradients) {
    auto m = mesh_of(DomainKind::UnitDisc, 6);
    for (const auto& g : element_gradients(DiscreteField::interpolate(m, [](const Point& x) { return x[0]; }))) {
        EXPECT_NEAR(g[0], 1.0, 1e-12);
        EXPECT_NEAR(g[1], 0.0, 1e-12);
    }
    for (const auto& g : element_gradients(DiscreteField::constant(m, 4.0))) {
        EXPECT_NEAR(norm(g), 0.0, 1e-12);
    }
    auto line = mesh_of(DomainKind::Interval, 4);
    const auto g = element_gradients(DiscreteField(line, {0.0, 1.0, 0.0, 0.0, 0.0}));
    EXPECT_DOUBLE_EQ(g[0][0], 2.0);
}

TEST(Fem, IntervalStiffnessIsSecondDifference) {
    auto m = mesh_of(DomainKind::Interval, 8);
    const auto sys = assemble_weighted_laplacian(*m, std::vector<double>(8, 1.0));
    const double h = 0.25;
    for (int i = 1; i < 8; ++i) {
        EXPECT_NEAR(sys.matrix.coeff(i, i), 2.0 / h, 1e-12);
        EXPECT_NEAR(sys.matrix.coeff(i, i - 1), -1.0 / h, 1e-12);
        EXPECT_NEAR(sys.matrix.coeff(i, i + 1), -1.0 / h, 1e-12);
    }
}

TEST(Fem, StiffnessLinearInWeights) {
    auto m = mesh_of(DomainKind::UnitSquare, 4);
    std::vector<double> w(m->element_count());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = 1.0 + (e % 3);
    std::vector<double> w2 = w;
    for (double& x : w2) x *= 2.0;
    const auto a = assemble_weighted_laplacian(*m, w);
    const auto b = assemble_weighted_laplacian(*m, w2);
    EXPECT_NEAR((Eigen::MatrixXd(b.matrix) - 2.0 * Eigen::MatrixXd(a.matrix)).norm(), 0.0, 1e-12);
}

TEST(Fem, RowSumsVanish) {
    auto m = mesh_of(DomainKind::UnitDisc, 8);
    std::vector<double> w(m->element_count());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = e % 2 ? 2.0 : 1.0;
    const auto sys = assemble_weighted_laplacian(*m, w);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m->node_count()));
    EXPECT_LT((sys.matrix * ones).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fem, StiffnessMatchesVariationalForm) {
    auto m = mesh_of(DomainKind::UnitDisc, 6);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> w(m->element_count());
    for (double& x : w) x = 1.5 + unit(rng);
    const auto sys = assemble_weighted_laplacian(*m, w);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd u(m->node_count()), phi(m->node_count());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u[i] = unit(rng);
            phi[i] = unit(rng);
        }
        const auto gu = element_gradients(DiscreteField(m, std::vector<double>(u.data(), u.data() + u.size())));
        const auto gp = element_gradients(DiscreteField(m, std::vector<double>(phi.data(), phi.data() + phi.size())));
        double direct = 0.0;
        for (std::size_t e = 0; e < m->element_count(); ++e) {
            direct += w[e] * m->measures[e] * (gu[e][0] * gp[e][0] + gu[e][1] * gp[e][1]);
        }
        EXPECT_NEAR(phi.dot(sys.matrix * u), direct, 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST(Fem, NonPositiveWeightRejected) {
    auto m = mesh_of(DomainKind::Interval, 4);
    EXPECT_THROW(assemble_weighted_laplacian(*m, std::vector<double>{1.0, 0.0, 1.0, 1.0}), InvalidParameter);
}

TEST(Fem, LoadVector) {
    auto m = mesh_of(DomainKind::Interval, 8);
    for (double v : assemble_load(*m, std::vector<double>(9, 0.0))) EXPECT_EQ(v, 0.0);
    const auto ones = assemble_load(*m, std::vector<double>(9, 1.0));
    for (int i = 1; i < 8; ++i) EXPECT_NEAR(ones[i], 0.25, 1e-15);
    // Linear f: int f phi_i = f(x_i) h for interior nodes of a uniform mesh.
    std::vector<double> lin(9);
    for (int i = 0; i < 9; ++i) lin[i] = 3.0 * m->nodes[i][0] + 1.0;
    const auto l = assemble_load(*m, lin);
    for (int i = 1; i < 8; ++i) EXPECT_NEAR(l[i], lin[i] * 0.25, 1e-14);
}

TEST(Fem, SolveRecoversKnownSolution) {
    auto m = mesh_of(DomainKind::UnitSquare, 8);
    auto sys = assemble_weighted_laplacian(*m, std::vector<double>(m->element_count(), 1.0));
    Eigen::VectorXd known(m->node_count());
    for (Eigen::Index i = 0; i < known.size(); ++i) known[i] = std::sin(static_cast<double>(i));
    sys.rhs = sys.matrix * known;
    std::vector<double> bvals;
    for (int b : m->boundary_nodes) bvals.push_back(known[b]);
    constrain(sys, m->boundary_nodes, bvals);
    const auto x = solve_spd(sys, 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], known[static_cast<Eigen::Index>(i)], 1e-9);
}

TEST(Fem, ZeroDataGivesZero) {
    auto m = mesh_of(DomainKind::UnitDisc, 6);
    auto sys = assemble_weighted_laplacian(*m, std::vector<double>(m->element_count(), 1.0));
    constrain(sys, m->boundary_nodes, std::vector<double>(m->boundary_nodes.size(), 0.0));
    for (double v : solve_spd(sys)) EXPECT_EQ(v, 0.0);
}

double poisson_max_error(int n) {
    auto m = mesh_of(DomainKind::Interval, n);
    auto sys = assemble_weighted_laplacian(*m, std::vector<double>(m->element_count(), 1.0));
    const auto load = assemble_load(*m, std::vector<double>(m->node_count(), 1.0));
    sys.rhs = Eigen::Map<const Eigen::VectorXd>(load.data(), static_cast<Eigen::Index>(load.size()));
    constrain(sys, m->boundary_nodes, std::vector<double>{0.0, 0.0});
    const auto u = solve_spd(sys, 1e-14);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = m->nodes[i][0];
        err = std::max(err, std::abs(u[i] - 0.5 * (1.0 - x * x)));
    }
    return err;
}

TEST(Fem, PoissonNodallyExact) {
    for (int n : {4, 16, 64}) EXPECT_LT(poisson_max_error(n), 1e-12) << n;
}

TEST(Fem, Norms) {
    auto line = mesh_of(DomainKind::Interval, 16);
    const auto x = DiscreteField::interpolate(line, [](const Point& p) { return p[0]; });
    EXPECT_NEAR(lp_gradient_norm(x, 2.0), std::sqrt(2.0), 1e-14);
    EXPECT_EQ(lp_gradient_norm(DiscreteField::constant(line, 2.0), 2.0), 0.0);
    auto sq = mesh_of(DomainKind::UnitSquare, 8);
    EXPECT_NEAR(lp_gradient_norm(DiscreteField::interpolate(sq, [](const Point& p) { return p[0]; }), 3.0), 1.0, 1e-14);
}

TEST(Fem, SupOnBall) {
    auto line = mesh_of(DomainKind::Interval, 16);
    const auto absx = DiscreteField::interpolate(line, [](const Point& p) { return std::abs(p[0]); });
    EXPECT_DOUBLE_EQ(sup_on_ball(absx, {0.0, 0.0}, 0.5), 0.5);
    auto disc = mesh_of(DomainKind::UnitDisc, 8);
    EXPECT_DOUBLE_EQ(sup_on_ball(DiscreteField::constant(disc, 3.0), {0.2, 0.1}, 0.4), 3.0);
    EXPECT_THROW(sup_on_ball(absx, {0.06, 0.0}, 0.01), MeshError);
}
