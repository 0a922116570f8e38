#pragma once

#include "qtp/fem.hpp"
#include "qtp/field.hpp"
#include "qtp/problem.hpp"
#include "qtp/solver.hpp"
#include "qtp/tab.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qtp {

/// Value of u at an arbitrary point by P1 interpolation. Throws MeshError outside the mesh.
double interpolate_at(const DiscreteField& u, const Point& x);

/// Zero of u nearest to `near`, located by linear interpolation along sign-changing edges (or a
/// node where u vanishes). Throws MeshError when u has no sign change.
Point nearest_zero(const DiscreteField& u, const Point& near);

/// Distance from x to the nearest node of opposite-or-zero sign (the closure of the opposite
/// phase). Returns the domain diameter when that set is empty. Throws
/// InvalidParameter("on free boundary") when u(x) = 0.
double free_boundary_distance(const DiscreteField& u, const Point& x);

struct DyadicConfig {
    double R0 = 0.5;
    double alpha = 0.9;
    int k_max = 5;
    Point center{0.0, 0.0};
};

struct DyadicProfile {
    std::vector<double> radii;  ///< R0^k, k = 1..k_max
    std::vector<double> sups;   ///< M_k = sup over B_{R0^k}(center) of |u - u(center)|
    /// Least-squares slope of log M_k against log R0^k; NaN when fewer than two usable levels.
    double fitted_alpha = std::numeric_limits<double>::quiet_NaN();
    /// R0^k_max >= 4 h_mesh
    bool well_resolved = false;
};

/// Throws InvalidParameter for R0 outside (0, 1), k_max < 1 or R0^k_max below h_mesh, and
/// MeshError from sup_on_ball.
DyadicProfile dyadic_decay_profile(const DiscreteField& u, const DyadicConfig& cfg);

struct HolderStratum {
    double lower;        ///< band of free_boundary_distance: [lower, upper)
    double upper;
    double seminorm;     ///< max quotient over sampled pairs whose nearer node lies in the band
    std::size_t pairs;
};

struct HolderTable {
    std::vector<HolderStratum> strata;
    double global_seminorm = 0.0;
    double sup_norm = 0.0;         ///< ||u||_inf over the domain
    double source_norm = 0.0;      ///< ||F||_{L^N}, F = |f_+| + |f_-|
    /// [u]_alpha (1 - r)^alpha / (||u||_inf + ||F||_{L^N}^{1/(p-1)})
    double constant_quotient = 0.0;
};

struct HolderReportOptions {
    double R0 = 0.2;   ///< strata edges at R0 / 8 and R0
    PairSampling sampling;
};

/// Hölder seminorm of u on B_r split by distance to the free boundary.
HolderTable holder_report(const DiscreteField& u, const ProblemSpec& spec, double alpha, double r,
                          const HolderReportOptions& opts = {});

struct HarnackRow {
    Point center;
    double d;
    double sup_outer;    ///< sup over B_{d/4} of u
    double inf_inner;    ///< inf over B_{d/8} of u
    double source_term;  ///< d ||F||_{L^N(B_{d/4})}^{1/(p-1)}
    double ratio;        ///< sup / (inf + source)
};

/// Throws InvalidParameter("not in positive phase") if u <= 0 at a node of B_{d/4}(center) and
/// MeshError when either ball holds no node.
HarnackRow harnack_ratio(const DiscreteField& u, const ProblemSpec& spec, const Point& center,
                         double d);

struct CaccioppoliRow {
    double s;
    double t;
    double lhs;             ///< int over B_s of |grad u|^p
    double annulus_energy;  ///< int over B_t \ B_s of |grad u|^p
    double gap_term;        ///< 1 / |s - t|^p
    double source_term;     ///< additive constant, 1
    double constant;        ///< lhs / (annulus + gap + source)
};

/// Requires 1/2 <= s < t <= 1; throws InvalidParameter otherwise. Balls are centred at the origin.
CaccioppoliRow caccioppoli_check(const DiscreteField& u, const ProblemSpec& spec, double s, double t);

/// ||F||_{L^N(ball)}, F = |f_+| + |f_-|, by element quadrature over elements with barycenter in the ball.
double source_norm(const ProblemSpec& spec, const Mesh& mesh, std::optional<Ball> region);

struct ProximityRow {
    double delta;
    double proximity = std::numeric_limits<double>::quiet_NaN();  ///< ||u - h||_{L^inf(B_{1/4})}
    bool failed = false;
    std::string reason;
};

/// A_{+,-}(x) = A_{+,-}(0) + delta (1 + cos(pi |x|)) / 2 and f_{+,-} = delta |B_1|^{-1/N}.
ProblemSpec perturbed_spec(const ProblemSpec& base, double delta);

/// Solves every perturbed problem, builds the regular profile on B_{1/2} from the solution's trace
/// and records the sup distance on B_{1/4}. `base` must have constant coefficients.
std::vector<ProximityRow> compactness_experiment(const ProblemSpec& base,
                                                 const std::vector<double>& delta_list, double eps,
                                                 const SolveOptions& opts);

/// Cumulative oscillation table of A_{+,-} over node pairs of a ball.
class ModulusOfContinuity {
public:
    /// Uses all pairs among the ball's nodes, thinned deterministically to `max_nodes` nodes.
    ModulusOfContinuity(const ScalarField& A_plus, const ScalarField& A_minus, const Mesh& mesh,
                        const Ball& region, std::size_t max_nodes = 3000);

    /// max oscillation over pairs with |x - y| < t; saturates at the ball diameter.
    double operator()(double t) const;

private:
    std::vector<double> distances_;
    std::vector<double> cumulative_;
};

double modulus_of_continuity(const ScalarField& A_plus, const ScalarField& A_minus,
                             const Mesh& mesh, const Ball& region, double t);

}  // namespace qtp
