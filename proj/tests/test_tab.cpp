#include "qtp/error.hpp"
#include "qtp/tab.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qtp;

namespace {

std::shared_ptr<const Mesh> mesh_of(DomainKind kind, int n) {
    return std::make_shared<const Mesh>(build_mesh({kind, n}));
}

}  // namespace

TEST(Tab, Examples) {
    auto m = mesh_of(DomainKind::Interval, 4);
    const DiscreteField u(m, {1.0, 0.0, -1.0, 0.5, -0.25});
    const auto v = apply_tab({2.0, 3.0}, u);
    EXPECT_EQ(v[0], 2.0);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_EQ(v[2], -3.0);
    const auto back = invert_tab({2.0, 3.0}, v);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(back[i], u[i]);
    EXPECT_THROW(apply_tab({0.0, 1.0}, u), InvalidParameter);
    EXPECT_THROW(invert_tab({1.0, -1.0}, u), InvalidParameter);
}

TEST(Tab, RoundTripWithinOneUlp) {
    auto m = mesh_of(DomainKind::Interval, 999);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-10.0, 10.0), coef(0.1, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(m->node_count());
        for (double& x : v) x = val(rng);
        const DiscreteField u(m, v);
        const TabParams t{coef(rng), coef(rng)};
        const auto back = invert_tab(t, apply_tab(t, u));
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_LE(std::abs(back[i] - v[i]), std::abs(std::nextafter(v[i], 2.0 * v[i]) - v[i]));
        }
    }
}

TEST(Tab, GradientIdentity) {
    auto m = mesh_of(DomainKind::UnitDisc, 8);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return x[0] + 0.3 * x[1]; });
    for (double q : {1.0, 2.0, 3.5}) {
        const auto gap = tab_gradient_identity_gap({2.0, 0.5}, u, q);
        EXPECT_LT(gap.max_gap, 1e-10);
        EXPECT_GT(gap.straddling_elements, 0u);
    }
    EXPECT_THROW(tab_gradient_identity_gap({1.0, 1.0}, u, 0.0), InvalidParameter);
}

TEST(Tab, HolderSeminormOfLinear) {
    auto m = mesh_of(DomainKind::Interval, 64);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return 3.0 * x[0]; });
    const Ball ball{{0.0, 0.0}, 1.0};
    EXPECT_NEAR(holder_seminorm(u, 1.0, ball, PairSampling{}), 3.0, 1e-12);
    EXPECT_THROW(holder_seminorm(u, 0.0, ball, PairSampling{}), InvalidParameter);
    EXPECT_THROW(holder_seminorm(u, 1.5, ball, PairSampling{}), InvalidParameter);
}

TEST(Tab, PairSamplingIsSeeded) {
    auto m = mesh_of(DomainKind::UnitSquare, 8);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return x[0] - 0.5; });
    const Ball ball{{0.5, 0.5}, 0.4};
    PairSampling plan;
    plan.seed = 4;
    plan.random_pairs = 100;
    EXPECT_EQ(sample_pairs(u, ball, plan), sample_pairs(u, ball, plan));
    plan.seed = 5;
    const auto other = sample_pairs(u, ball, plan);
    plan.seed = 4;
    EXPECT_NE(sample_pairs(u, ball, plan), other);
}

TEST(Tab, HolderTransfer) {
    auto m = mesh_of(DomainKind::UnitSquare, 8);
    const auto u = DiscreteField::interpolate(m, [](const Point& x) { return std::sin(4.0 * x[0]) - x[1]; });
    PairSampling plan;
    plan.random_pairs = 500;
    for (double alpha : {0.3, 0.7, 1.0}) {
        const auto t = check_holder_transfer({0.4, 2.5}, u, alpha, Ball{{0.5, 0.5}, 0.5}, plan);
        EXPECT_LE(t.lhs, t.rhs + 1e-12);
    }
}

TEST(Tab, MonotonicityGapExamples) {
    EXPECT_DOUBLE_EQ(monotonicity_gap({1.0, 0.0}, {0.0, 0.0}, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(monotonicity_gap({1.0, 0.0}, {-1.0, 0.0}, 3.0), 4.0);
    EXPECT_DOUBLE_EQ(monotonicity_gap({0.5, 0.5}, {0.5, 0.5}, 4.0), 0.0);
    EXPECT_DOUBLE_EQ(monotonicity_middle_bound({1.0, 0.0}, {-1.0, 0.0}, 3.0), 8.0);
    EXPECT_DOUBLE_EQ(monotonicity_sharp_constant(2.0), 1.0);
    EXPECT_DOUBLE_EQ(monotonicity_sharp_constant(3.0), 0.5);
    EXPECT_THROW(monotonicity_gap({1.0, 0.0}, {0.0, 0.0}, 1.0), InvalidParameter);
}

TEST(Tab, MonotonicityConstantScan) {
    // Brute-force minimum of gap / |v1 - v2|^p over a grid of directions and lengths.
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        double lowest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 48; ++i) {
            for (int j = 0; j < 48; ++j) {
                for (double r : {0.25, 1.0, 3.0}) {
                    const double a = 2.0 * M_PI * i / 48, b = 2.0 * M_PI * j / 48;
                    const Vec v1{std::cos(a), std::sin(a)};
                    const Vec v2{r * std::cos(b), r * std::sin(b)};
                    const double d = distance(v1, v2);
                    if (d < 1e-9) continue;
                    const double gap = monotonicity_gap(v1, v2, p);
                    EXPECT_GE(gap, monotonicity_middle_bound(v1, v2, p) * monotonicity_sharp_constant(p) * (1.0 - 1e-12));
                    lowest = std::min(lowest, gap / std::pow(d, p));
                }
            }
        }
        EXPECT_GE(lowest, monotonicity_sharp_constant(p) * (1.0 - 1e-12)) << p;
        EXPECT_NEAR(lowest, monotonicity_sharp_constant(p), 1e-12) << p;
    }
}

TEST(Tab, ConvergenceWitness) {
    const Vec v{1.0, -2.0};
    std::vector<Vec> seq;
    for (int k = 1; k <= 60; ++k) seq.push_back({v[0] + std::pow(0.5, k), v[1]});
    const auto w = gradient_convergence_witness(seq, v, 3.0);
    EXPECT_TRUE(w.gaps_vanish);
    EXPECT_TRUE(w.differences_vanish);
    const auto far = gradient_convergence_witness({{0.0, 0.0}}, v, 3.0);
    EXPECT_FALSE(far.gaps_vanish);
    EXPECT_FALSE(far.differences_vanish);
    EXPECT_TRUE(gradient_convergence_witness({}, v, 2.0).gaps_vanish);
}

TEST(Tab, ParamsForFrozen) {
    const auto t = tab_params_for({4.0, 9.0, 3.0});
    EXPECT_DOUBLE_EQ(t.a, 2.0);
    EXPECT_DOUBLE_EQ(t.b, 3.0);
    EXPECT_THROW(tab_params_for({1.0, 1.0, 1.0}), InvalidParameter);
}

TEST(Tab, RegularProfileOfLinearTrace) {
    auto m = mesh_of(DomainKind::UnitDisc, 8);
    const auto g = DiscreteField::interpolate(m, [](const Point& x) { return x[0] - 0.5 * x[1]; });
    const auto h = make_regular_profile({1.0, 1.0, 3.0}, g);
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], g[i], 1e-6);
}

TEST(Tab, RegularProfileReproducesOracle) {
    auto m = mesh_of(DomainKind::Interval, 50);
    const auto o = solve_oracle_1d(4.0, 1.0, 2.0);
    const auto g = DiscreteField::interpolate(m, [&](const Point& x) { return o(x[0]); });
    const auto h = make_regular_profile({4.0, 1.0, 2.0}, g);
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], g[i], 1e-8);
}
