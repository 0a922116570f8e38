#pragma once

#include "qtp/fem.hpp"
#include "qtp/field.hpp"
#include "qtp/solver.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace qtp {

/// Phase rescaling v -> a v^+ - b v^-.
struct TabParams {
    double a = 1.0;
    double b = 1.0;

    void validate() const;
};

DiscreteField apply_tab(const TabParams& params, const DiscreteField& u);
/// Inverse map v -> v^+ / a - v^- / b.
DiscreteField invert_tab(const TabParams& params, const DiscreteField& v);

struct GradientIdentityGap {
    double max_gap = 0.0;
    std::size_t sign_pure_elements = 0;
    std::size_t straddling_elements = 0;  ///< elements with nodal values of both signs, excluded
};

/// max over sign-pure elements of | |grad T(u)|^q - (|grad(a u^+)|^q + |grad(b u^-)|^q) |.
/// Requires q > 0; throws InvalidParameter("no sign-pure element") when every element straddles.
GradientIdentityGap tab_gradient_identity_gap(const TabParams& params, const DiscreteField& u,
                                              double q);

/// Deterministic node-pair sample for Hölder seminorms.
struct PairSampling {
    std::uint64_t seed = 0;
    std::size_t random_pairs = 20000;
    /// Also take every pair among nodes within this many h_mesh of the zero set.
    double interface_band = 3.0;
};

/// Node pairs inside a ball, drawn once and reusable across fields on the same mesh.
std::vector<std::pair<int, int>> sample_pairs(const DiscreteField& u, const Ball& region,
                                              const PairSampling& plan);

/// max over pairs of |u(x) - u(y)| / |x - y|^alpha. Throws InvalidParameter for alpha outside
/// (0, 1] or an empty region.
double holder_seminorm(const DiscreteField& u, double alpha, const Ball& region,
                       const PairSampling& plan);
double holder_seminorm(const DiscreteField& u, double alpha,
                       const std::vector<std::pair<int, int>>& pairs);

struct HolderTransfer {
    double lhs;  ///< [u]_alpha
    double rhs;  ///< [T u]_alpha / min(a, b)
};

/// Both seminorms on one pair sample; lhs <= rhs + 1e-12 is the expected contract.
HolderTransfer check_holder_transfer(const TabParams& params, const DiscreteField& u, double alpha,
                                     const Ball& region, const PairSampling& plan);

using Vec = Point;

/// (|v1|^{p-2} v1 - |v2|^{p-2} v2) . (v1 - v2)
double monotonicity_gap(const Vec& v1, const Vec& v2, double p);
/// |v1 - v2|^2 (|v1| + |v2|)^{p-2}, the middle term of the classical chain of lower bounds.
double monotonicity_middle_bound(const Vec& v1, const Vec& v2, double p);
/// Sharp constant c_p = 2^{2-p} in gap >= c_p |v1 - v2|^p for p >= 2.
double monotonicity_sharp_constant(double p);

struct ConvergenceWitness {
    bool gaps_vanish;        ///< G_k of the last sample below gap_tol
    bool differences_vanish; ///< |v_k - v| of the last sample below the derived difference tolerance
};

/// Finite-sequence check of "G_k -> 0 implies v_k -> v". The difference tolerance is derived from
/// gap_tol through the monotonicity inequality: 10 gap_tol^{1/max(p,2)} max(1, |v|).
ConvergenceWitness gradient_convergence_witness(const std::vector<Vec>& vk, const Vec& v, double p,
                                                double gap_tol = 1e-8);

/// Frozen-coefficient data at the centre: A_{+,-}(x0) and p.
struct FrozenCoefficients {
    double A_plus;
    double A_minus;
    double p;
};

/// Profile h solving div(A(x0, h)|grad h|^{p-2} grad h) = 0 with the boundary values of
/// `boundary` on its mesh: the p-harmonic extension H of T_{a,b}(boundary), a = A_plus^{1/(p-1)},
/// b = A_minus^{1/(p-1)}, mapped back through the inverse rescaling. Solver failures propagate.
DiscreteField make_regular_profile(const FrozenCoefficients& frozen, const DiscreteField& boundary,
                                   const SolveOptions& opts = {});

/// a = A_plus^{1/(p-1)}, b = A_minus^{1/(p-1)}.
TabParams tab_params_for(const FrozenCoefficients& frozen);

}  // namespace qtp
