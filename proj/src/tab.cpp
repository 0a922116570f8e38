#include "qtp/tab.hpp"

#include "qtp/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qtp {

void TabParams::validate() const {
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidParameter("T_{a,b} needs a > 0 and b > 0");
    }
}

DiscreteField apply_tab(const TabParams& params, const DiscreteField& u) {
    params.validate();
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = u[i] > 0.0 ? params.a * u[i] : params.b * u[i];
    }
    return DiscreteField(u.mesh_ptr(), std::move(v));
}

DiscreteField invert_tab(const TabParams& params, const DiscreteField& v) {
    params.validate();
    std::vector<double> u(v.size());
    // Division rather than multiplication by 1/a keeps the round trip within one rounding.
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = v[i] > 0.0 ? v[i] / params.a : v[i] / params.b;
    }
    return DiscreteField(v.mesh_ptr(), std::move(u));
}

GradientIdentityGap tab_gradient_identity_gap(const TabParams& params, const DiscreteField& u,
                                              double q) {
    params.validate();
    if (!(q > 0.0)) throw InvalidParameter("q must be positive");
    const Mesh& mesh = u.mesh();
    std::vector<double> plus(u.size()), minus(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        plus[i] = params.a * std::max(u[i], 0.0);
        minus[i] = params.b * std::max(-u[i], 0.0);
    }
    const auto grad_t = element_gradients(apply_tab(params, u));
    const auto grad_plus = element_gradients(DiscreteField(u.mesh_ptr(), std::move(plus)));
    const auto grad_minus = element_gradients(DiscreteField(u.mesh_ptr(), std::move(minus)));

    GradientIdentityGap out;
    const int nv = mesh.vertices_per_element();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < nv; ++i) {
            const double s = u[mesh.elements[e][i]];
            has_pos |= s > 0.0;
            has_neg |= s < 0.0;
        }
        if (has_pos && has_neg) {
            ++out.straddling_elements;
            continue;
        }
        ++out.sign_pure_elements;
        const double lhs = std::pow(norm(grad_t[e]), q);
        const double rhs = std::pow(norm(grad_plus[e]), q) + std::pow(norm(grad_minus[e]), q);
        out.max_gap = std::max(out.max_gap, std::abs(lhs - rhs));
    }
    if (out.sign_pure_elements == 0) throw InvalidParameter("no sign-pure element");
    return out;
}

std::vector<std::pair<int, int>> sample_pairs(const DiscreteField& u, const Ball& region,
                                              const PairSampling& plan) {
    const Mesh& mesh = u.mesh();
    std::vector<int> inside;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (region.contains(mesh.nodes[i])) inside.push_back(static_cast<int>(i));
    }
    if (inside.size() < 2) throw InvalidParameter("region holds fewer than two nodes");

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(plan.random_pairs);
    std::mt19937_64 rng(plan.seed);
    std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
    while (pairs.size() < plan.random_pairs) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        if (i != j) pairs.emplace_back(inside[i], inside[j]);
    }

    if (plan.interface_band <= 0.0) return pairs;
    // Zero set: nodes where u vanishes or that belong to an element with a sign change.
    std::vector<char> zero(mesh.node_count(), 0);
    const int nv = mesh.vertices_per_element();
    for (std::size_t i = 0; i < mesh.node_count(); ++i) zero[i] = u[i] == 0.0;
    for (const auto& el : mesh.elements) {
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < nv; ++i) {
            has_pos |= u[el[i]] > 0.0;
            has_neg |= u[el[i]] < 0.0;
        }
        if (has_pos && has_neg) {
            for (int i = 0; i < nv; ++i) zero[el[i]] = 1;
        }
    }
    std::vector<int> zero_nodes;
    for (std::size_t i = 0; i < zero.size(); ++i) {
        if (zero[i]) zero_nodes.push_back(static_cast<int>(i));
    }
    if (zero_nodes.empty()) return pairs;

    const double band = plan.interface_band * mesh.h_mesh;
    std::vector<int> near;
    for (int i : inside) {
        for (int z : zero_nodes) {
            if (distance(mesh.nodes[i], mesh.nodes[z]) <= band) {
                near.push_back(i);
                break;
            }
        }
    }
    constexpr std::size_t kMaxBandNodes = 2000;
    if (near.size() > kMaxBandNodes) {
        std::vector<int> thinned;
        const double stride = static_cast<double>(near.size()) / kMaxBandNodes;
        for (std::size_t k = 0; k < kMaxBandNodes; ++k) {
            thinned.push_back(near[static_cast<std::size_t>(k * stride)]);
        }
        near = std::move(thinned);
    }
    for (std::size_t i = 0; i < near.size(); ++i) {
        for (std::size_t j = i + 1; j < near.size(); ++j) pairs.emplace_back(near[i], near[j]);
    }
    return pairs;
}

double holder_seminorm(const DiscreteField& u, double alpha,
                       const std::vector<std::pair<int, int>>& pairs) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must lie in (0, 1]");
    const Mesh& mesh = u.mesh();
    double best = 0.0;
    for (const auto& [i, j] : pairs) {
        const double d = distance(mesh.nodes[i], mesh.nodes[j]);
        if (d == 0.0) continue;
        const double ratio =
            std::abs(u[i] - u[j]) / (alpha == 1.0 ? d : std::pow(d, alpha));
        best = std::max(best, ratio);
    }
    return best;
}

double holder_seminorm(const DiscreteField& u, double alpha, const Ball& region,
                       const PairSampling& plan) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must lie in (0, 1]");
    return holder_seminorm(u, alpha, sample_pairs(u, region, plan));
}

HolderTransfer check_holder_transfer(const TabParams& params, const DiscreteField& u, double alpha,
                                     const Ball& region, const PairSampling& plan) {
    params.validate();
    const auto pairs = sample_pairs(u, region, plan);
    const double lhs = holder_seminorm(u, alpha, pairs);
    const double transformed = holder_seminorm(apply_tab(params, u), alpha, pairs);
    return {lhs, transformed / std::min(params.a, params.b)};
}

namespace {

Vec power_flux(const Vec& v, double p) {
    const double n = norm(v);
    if (n == 0.0) return {0.0, 0.0};
    const double s = std::pow(n, p - 2.0);
    return {s * v[0], s * v[1]};
}

}  // namespace

double monotonicity_gap(const Vec& v1, const Vec& v2, double p) {
    if (!(p > 1.0)) throw InvalidParameter("p must exceed 1");
    const Vec a = power_flux(v1, p);
    const Vec b = power_flux(v2, p);
    return (a[0] - b[0]) * (v1[0] - v2[0]) + (a[1] - b[1]) * (v1[1] - v2[1]);
}

double monotonicity_middle_bound(const Vec& v1, const Vec& v2, double p) {
    const double d = distance(v1, v2);
    if (d == 0.0) return 0.0;
    return d * d * std::pow(norm(v1) + norm(v2), p - 2.0);
}

double monotonicity_sharp_constant(double p) {
    return std::pow(2.0, 2.0 - p);
}

ConvergenceWitness gradient_convergence_witness(const std::vector<Vec>& vk, const Vec& v, double p,
                                                double gap_tol) {
    if (!(p > 1.0)) throw InvalidParameter("p must exceed 1");
    if (vk.empty()) return {true, true};
    const Vec& last = vk.back();
    const double gap = monotonicity_gap(last, v, p);
    const double diff_tol = 10.0 * std::pow(gap_tol, 1.0 / std::max(p, 2.0)) * std::max(1.0, norm(v));
    return {gap <= gap_tol, distance(last, v) <= diff_tol};
}

TabParams tab_params_for(const FrozenCoefficients& frozen) {
    if (!(frozen.p > 1.0)) throw InvalidParameter("p must exceed 1");
    return {std::pow(frozen.A_plus, 1.0 / (frozen.p - 1.0)),
            std::pow(frozen.A_minus, 1.0 / (frozen.p - 1.0))};
}

DiscreteField make_regular_profile(const FrozenCoefficients& frozen, const DiscreteField& boundary,
                                   const SolveOptions& opts) {
    const TabParams params = tab_params_for(frozen);
    const DiscreteField transformed = apply_tab(params, boundary);

    ProblemSpec single_phase;
    single_phase.p = frozen.p;
    single_phase.mu = 0.5;
    single_phase.A_plus = ScalarField::constant(1.0);
    single_phase.A_minus = ScalarField::constant(1.0);
    // For p != 2 the mollified coefficient of equal phases still dips near the zero level, so
    // lift the data into the positive phase, where it is exactly 1, and shift back afterwards.
    double top = 0.0;
    for (double v : transformed.values()) top = std::max(top, std::abs(v));
    const double lift = top + 2.0;
    std::vector<double> lifted(transformed.values().begin(), transformed.values().end());
    for (double& v : lifted) v += lift;
    single_phase.g = ScalarField::nodal(std::move(lifted));
    single_phase.domain.kind = boundary.mesh().kind;

    auto [H, report] = solve_regularized(single_phase, boundary.mesh_ptr(), 1.0, opts);
    std::vector<double> h(H.values().begin(), H.values().end());
    for (double& v : h) v -= lift;
    return invert_tab(params, DiscreteField(H.mesh_ptr(), std::move(h)));
}

}  // namespace qtp
