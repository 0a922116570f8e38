#include "qtp/error.hpp"
#include "qtp/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qtp;

namespace {

std::shared_ptr<const Mesh> mesh_of(DomainKind kind, int n) {
    return std::make_shared<const Mesh>(build_mesh({kind, n}));
}

ProblemSpec single_phase(double p, DomainKind kind, int n) {
    ProblemSpec s;
    s.p = p;
    s.mu = 0.5;
    s.g = ScalarField::expression("x1");
    s.domain = {kind, n};
    return s;
}

ProblemSpec oracle_spec(double p, double A_plus, int n) {
    ProblemSpec s;
    s.p = p;
    s.mu = 1.0 / A_plus;
    s.A_plus = ScalarField::constant(A_plus);
    s.A_minus = ScalarField::constant(1.0);
    s.g = ScalarField::expression("x1");
    s.domain = {DomainKind::Interval, n};
    return s;
}

double max_error(const DiscreteField& u, const std::function<double(double)>& exact) {
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        err = std::max(err, std::abs(u[i] - exact(u.mesh().nodes[i][0])));
    }
    return err;
}

}  // namespace

TEST(Solver, OracleSlopes) {
    const auto o = solve_oracle_1d(4.0, 1.0, 2.0);
    EXPECT_NEAR(o.x0, -0.6, 1e-14);
    EXPECT_NEAR(o.slope_plus, 0.625, 1e-14);
    EXPECT_NEAR(o.slope_minus, 2.5, 1e-14);
    EXPECT_NEAR(o(1.0), 1.0, 1e-14);
    EXPECT_NEAR(o(-1.0), -1.0, 1e-14);
    EXPECT_NEAR(solve_oracle_1d(8.0, 1.0, 3.0).x0, -0.47759225007251715, 1e-12);
    EXPECT_NEAR(solve_oracle_1d(2.0, 2.0, 3.0).x0, 0.0, 1e-14);
}

TEST(Solver, OracleFluxBalance) {
    for (double p : {1.5, 2.0, 3.0, 4.5}) {
        const auto o = solve_oracle_1d(3.0, 0.7, p);
        EXPECT_NEAR(3.0 * std::pow(o.slope_plus, p - 1.0), 0.7 * std::pow(o.slope_minus, p - 1.0), 1e-12);
    }
}

TEST(Solver, LinearDataIsExact) {
    auto s = single_phase(2.0, DomainKind::UnitSquare, 8);
    const auto [u, report] = solve_regularized(s, 1e-3, SolveOptions{});
    EXPECT_TRUE(report.converged);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], u.mesh().nodes[i][0], 1e-8);
}

TEST(Solver, PLaplacianSinglePhaseLinear) {
    auto s = single_phase(3.0, DomainKind::Interval, 64);
    const auto [u, report] = solve_regularized(s, 1e-3, SolveOptions{});
    EXPECT_TRUE(report.converged);
    EXPECT_LT(max_error(u, [](double x) { return x; }), 1e-6);
}

TEST(Solver, TwoPhaseOracle) {
    for (double p : {2.0, 3.0}) {
        const auto s = oracle_spec(p, 4.0, 256);
        SolveOptions opts;
        opts.max_picard = 1000;
        const auto [u, report] = solve_regularized(s, 1e-3, opts);
        const auto o = solve_oracle_1d(4.0, 1.0, p);
        EXPECT_LE(max_error(u, o), 2.0 / 256) << "p = " << p;
    }
}

TEST(Solver, HistoriesTrackIterations) {
    ProblemSpec s = single_phase(3.0, DomainKind::UnitDisc, 12);
    s.mu = 0.4;
    s.A_plus = ScalarField::constant(2.0);
    s.A_minus = ScalarField::constant(0.5);
    SolveOptions opts;
    opts.max_picard = 1000;
    const auto [u, report] = solve_regularized(s, 0.1, opts);
    const auto n = static_cast<std::size_t>(report.iterations);
    ASSERT_EQ(report.energy_history.size(), n);
    ASSERT_EQ(report.residual_history.size(), n);
    ASSERT_EQ(report.damping_history.size(), n);
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_GT(report.energy_history[k], 0.0);
        EXPECT_LE(report.damping_history[k], opts.damping);
        EXPECT_GE(report.damping_history[k], opts.min_damping);
    }
    EXPECT_NEAR(report.energy_history[n - 1], regularized_energy(s, u, 0.1), 1e-12);
}

TEST(Solver, RejectsBadInput) {
    ProblemSpec s = single_phase(2.0, DomainKind::Interval, 8);
    EXPECT_THROW(solve_regularized(s, 0.0, SolveOptions{}), InvalidParameter);
    SolveOptions bad;
    bad.damping = 1.5;
    EXPECT_THROW(solve_regularized(s, 1e-3, bad), InvalidParameter);
    s.mu = 2.0;
    EXPECT_THROW(solve_regularized(s, 1e-3, SolveOptions{}), ValidationError);
}

TEST(Solver, ContinuationSingleLevel) {
    const auto s = oracle_spec(2.0, 4.0, 64);
    const auto c = epsilon_continuation(s, {0.1}, SolveOptions{});
    EXPECT_EQ(c.fields.size(), 1u);
    EXPECT_TRUE(c.cauchy_gaps.empty());
    EXPECT_EQ(c.split_checks.size(), 1u);
}

TEST(Solver, ContinuationInvariants) {
    const auto s = oracle_spec(2.0, 4.0, 128);
    const auto c = epsilon_continuation(s, {0.4, 0.2, 0.1, 0.05}, SolveOptions{});
    ASSERT_EQ(c.cauchy_gaps.size(), 3u);
    for (std::size_t j = 0; j < c.eps_values.size(); ++j) {
        EXPECT_LE(c.split_checks[j], 1e-12);
        EXPECT_LE(c.plus_part_gaps[j], c.eps_values[j] / 2.0 + 1e-12);
    }
    EXPECT_THROW(epsilon_continuation(s, {0.1, 0.2}, SolveOptions{}), InvalidParameter);
}

TEST(Solver, SplitFields) {
    auto m = mesh_of(DomainKind::Interval, 32);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return std::sin(3.0 * x[0]); });
    const auto [up, um] = split_fields(0.1, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_NEAR(up[i] - um[i], u[i], 1e-12);
        EXPECT_GE(up[i], 0.0);
        EXPECT_GE(um[i], -0.05 - 1e-12);
        EXPECT_LE(std::abs(up[i] - std::max(u[i], 0.0)), 0.05 + 1e-12);
    }
}

TEST(Solver, RescaleIdentity) {
    const ProblemSpec s = oracle_spec(2.0, 4.0, 32);
    auto m = mesh_of(DomainKind::Interval, 32);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return x[0] * x[0] - 0.3; });
    const auto r = rescale_solution(s, u, 1.0, 1.0, 0.0, {0.0, 0.0});
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(r.w[i], u[i], 1e-12);
}

TEST(Solver, RescaleScalesAndShifts) {
    ProblemSpec s = oracle_spec(3.0, 4.0, 32);
    s.f_plus = ScalarField::constant(1.0);
    auto m = mesh_of(DomainKind::Interval, 32);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return x[0]; });
    const auto r = rescale_solution(s, u, 0.5, 2.0, 0.0, {0.25, 0.0});
    for (std::size_t i = 0; i < r.w.size(); ++i) {
        const double y = r.w.mesh().nodes[i][0];
        EXPECT_NEAR(r.w[i], 2.0 * (0.5 * y + 0.25), 1e-12);
    }
    // Phi^{p-1} Theta^p = 4 / 8.
    EXPECT_NEAR(r.spec.f_plus.at_point({0.1, 0.0}), 0.5, 1e-12);
    EXPECT_THROW(rescale_solution(s, u, 0.9, 1.0, 0.0, {0.5, 0.0}), InvalidParameter);
}
