#include "qtp/diagnostics.hpp"
#include "qtp/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qtp;

namespace {

std::shared_ptr<const Mesh> mesh_of(DomainKind kind, int n) {
    return std::make_shared<const Mesh>(build_mesh({kind, n}));
}

DiscreteField on(std::shared_ptr<const Mesh> m, const std::function<double(const Point&)>& f) {
    return DiscreteField::interpolate(std::move(m), f);
}

}  // namespace

TEST(Diagnostics, InterpolateAt) {
    auto m = mesh_of(DomainKind::UnitDisc, 8);
    const auto u = on(m, [](const Point& x) { return 2.0 * x[0] - x[1] + 1.0; });
    EXPECT_NEAR(interpolate_at(u, {0.13, -0.41}), 2.0 * 0.13 + 0.41 + 1.0, 1e-12);
    EXPECT_THROW(interpolate_at(u, {2.0, 0.0}), MeshError);
}

TEST(Diagnostics, NearestZero) {
    auto m = mesh_of(DomainKind::Interval, 10);
    const auto z = nearest_zero(on(m, [](const Point& x) { return x[0] - 0.3; }), {0.0, 0.0});
    EXPECT_NEAR(z[0], 0.3, 1e-12);
    EXPECT_THROW(nearest_zero(DiscreteField::constant(m, 1.0), {0.0, 0.0}), MeshError);
}

TEST(Diagnostics, FreeBoundaryDistance) {
    auto m = mesh_of(DomainKind::Interval, 16);
    const auto u = on(m, [](const Point& x) { return x[0]; });
    EXPECT_DOUBLE_EQ(free_boundary_distance(u, {0.5, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(free_boundary_distance(u, {-0.75, 0.0}), 0.75);
    EXPECT_THROW(free_boundary_distance(u, {0.0, 0.0}), InvalidParameter);
    EXPECT_DOUBLE_EQ(free_boundary_distance(DiscreteField::constant(m, 2.0), {0.5, 0.0}), 2.0);
}

TEST(Diagnostics, DyadicSqrtProfile) {
    auto m = mesh_of(DomainKind::Interval, 256);
    const auto u = on(m, [](const Point& x) { return std::sqrt(std::abs(x[0])); });
    DyadicConfig cfg;
    cfg.k_max = 4;
    const auto prof = dyadic_decay_profile(u, cfg);
    ASSERT_EQ(prof.sups.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(prof.sups[k], std::sqrt(prof.radii[k]), 1e-12);
    EXPECT_NEAR(prof.fitted_alpha, 0.5, 1e-12);
    EXPECT_TRUE(prof.well_resolved);
}

TEST(Diagnostics, DyadicLinearAndZero) {
    auto m = mesh_of(DomainKind::UnitSquare, 64);
    DyadicConfig cfg;
    cfg.center = {0.5, 0.5};
    cfg.k_max = 3;
    EXPECT_NEAR(dyadic_decay_profile(on(m, [](const Point& x) { return x[0] + 7.0; }), cfg).fitted_alpha, 1.0, 1e-12);
    EXPECT_TRUE(std::isnan(dyadic_decay_profile(DiscreteField::constant(m, 0.0), cfg).fitted_alpha));
    cfg.k_max = 12;
    EXPECT_THROW(dyadic_decay_profile(DiscreteField::constant(m, 0.0), cfg), InvalidParameter);
    cfg.k_max = 3;
    cfg.R0 = 1.0;
    EXPECT_THROW(dyadic_decay_profile(DiscreteField::constant(m, 0.0), cfg), InvalidParameter);
}

TEST(Diagnostics, HolderStrataOnOracle) {
    ProblemSpec s;
    s.mu = 0.2;
    s.A_plus = ScalarField::constant(4.0);
    s.domain = {DomainKind::Interval, 100};
    auto m = mesh_of(DomainKind::Interval, 100);
    const auto o = solve_oracle_1d(4.0, 1.0, 2.0);
    const auto u = on(m, [&](const Point& x) { return o(x[0]); });
    const auto t = holder_report(u, s, 1.0, 0.9);
    ASSERT_EQ(t.strata.size(), 3u);
    EXPECT_NEAR(t.global_seminorm, 2.5, 1e-9);
    std::size_t total = 0;
    for (const auto& st : t.strata) {
        EXPECT_LE(st.seminorm, t.global_seminorm);
        total += st.pairs;
    }
    EXPECT_GT(total, 0u);
    EXPECT_DOUBLE_EQ(t.strata[0].upper, 0.2 / 8);
    EXPECT_DOUBLE_EQ(t.sup_norm, 1.0);
    EXPECT_EQ(t.source_norm, 0.0);
    EXPECT_NEAR(t.constant_quotient, 2.5 * 0.1, 1e-9);
}

TEST(Diagnostics, SourceNorm) {
    ProblemSpec s;
    s.f_plus = ScalarField::constant(1.0);
    s.f_minus = ScalarField::constant(-2.0);
    const Mesh line = build_mesh({DomainKind::Interval, 64});
    EXPECT_NEAR(source_norm(s, line, std::nullopt), 6.0, 1e-12);
    EXPECT_NEAR(source_norm(s, line, Ball{{0.0, 0.0}, 0.5}), 3.0, 1e-12);
}

TEST(Diagnostics, HarnackOfConstant) {
    ProblemSpec s;
    auto m = mesh_of(DomainKind::UnitDisc, 32);
    const auto row = harnack_ratio(DiscreteField::constant(m, 0.7), s, {0.0, 0.0}, 0.5);
    EXPECT_DOUBLE_EQ(row.ratio, 1.0);
    EXPECT_DOUBLE_EQ(row.source_term, 0.0);
    EXPECT_THROW(harnack_ratio(DiscreteField::constant(m, -0.7), s, {0.0, 0.0}, 0.5), InvalidParameter);
    EXPECT_THROW(harnack_ratio(DiscreteField::constant(m, 0.7), s, {0.01, 0.013}, 1e-4), MeshError);
}

TEST(Diagnostics, HarnackOnLinear) {
    ProblemSpec s;
    // h = 0.1 puts nodes on both ball edges.
    auto m = mesh_of(DomainKind::Interval, 20);
    const auto u = on(m, [](const Point& x) { return x[0] + 1.0; });
    const auto row = harnack_ratio(u, s, {0.0, 0.0}, 0.8);
    EXPECT_NEAR(row.ratio, 1.2 / 0.9, 1e-12);
}

TEST(Diagnostics, CaccioppoliAreas) {
    ProblemSpec s;
    auto m = mesh_of(DomainKind::UnitDisc, 32);
    const auto u = on(m, [](const Point& x) { return x[0]; });
    const auto row = caccioppoli_check(u, s, 0.5, 1.0);
    EXPECT_NEAR(row.lhs, M_PI / 4.0, 0.02 * M_PI / 4.0);
    EXPECT_NEAR(row.annulus_energy, 3.0 * M_PI / 4.0, 0.02 * 3.0 * M_PI / 4.0);
    EXPECT_DOUBLE_EQ(row.gap_term, 4.0);
    EXPECT_DOUBLE_EQ(row.source_term, 1.0);
    EXPECT_DOUBLE_EQ(row.constant, row.lhs / (row.annulus_energy + 5.0));
    EXPECT_THROW(caccioppoli_check(u, s, 0.4, 0.9), InvalidParameter);
    EXPECT_THROW(caccioppoli_check(u, s, 0.8, 0.7), InvalidParameter);
}

TEST(Diagnostics, PerturbedSpec) {
    ProblemSpec base;
    base.mu = 0.4;
    base.A_plus = ScalarField::constant(2.0);
    base.A_minus = ScalarField::constant(0.5);
    base.f_plus = ScalarField::constant(1.0);
    base.domain = {DomainKind::UnitDisc, 8};
    const auto zero = perturbed_spec(base, 0.0);
    EXPECT_EQ(zero.f_plus.at_point({0.3, 0.1}), 0.0);
    EXPECT_EQ(zero.A_plus.at_point({0.3, 0.1}), 2.0);
    const auto pert = perturbed_spec(base, 0.1);
    EXPECT_NEAR(pert.A_plus.at_point({0.0, 0.0}), 2.1, 1e-14);
    EXPECT_NEAR(pert.A_minus.at_point({1.0, 0.0}), 0.5, 1e-14);
    EXPECT_NEAR(pert.f_minus.at_point({0.2, 0.2}), 0.1 / std::sqrt(M_PI), 1e-14);
}

TEST(Diagnostics, CompactnessSinglePhase) {
    ProblemSpec base;
    base.domain = {DomainKind::UnitDisc, 16};
    base.g = ScalarField::expression("x1");
    const auto rows = compactness_experiment(base, {0.0, 0.1, 0.2}, 0.01, SolveOptions{});
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) EXPECT_FALSE(r.failed) << r.reason;
    EXPECT_LT(rows[0].proximity, 1e-6);
    EXPECT_GT(rows[1].proximity, rows[0].proximity);
    EXPECT_GT(rows[2].proximity, rows[1].proximity);
}

TEST(Diagnostics, ModulusOfLinearCoefficient) {
    ProblemSpec s;
    const Mesh disc = build_mesh({DomainKind::UnitDisc, 16});
    const ScalarField a = ScalarField::expression("x1");
    const ModulusOfContinuity omega(a, a, disc, Ball{{0.0, 0.0}, 1.0});
    for (double t : {0.1, 0.5, 1.0}) {
        EXPECT_LE(omega(t), t);
        EXPECT_GE(omega(t), t - 2.0 * disc.h_mesh);
    }
    EXPECT_NEAR(omega(3.0), 2.0, 1e-12);
    EXPECT_THROW(omega(0.0), InvalidParameter);
    const ScalarField c = ScalarField::constant(1.3);
    EXPECT_EQ(modulus_of_continuity(c, c, disc, Ball{{0.0, 0.0}, 1.0}, 0.5), 0.0);
}
