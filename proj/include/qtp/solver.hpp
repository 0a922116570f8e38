#pragma once

#include "qtp/error.hpp"
#include "qtp/field.hpp"
#include "qtp/problem.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qtp {

struct SolveOptions {
    double tol_picard = 1e-8;   ///< relative nodal update that stops the iteration
    int max_picard = 200;
    double damping = 0.7;       ///< initial relaxation factor theta in (0, 1]
    double min_damping = 0.1;
    double grad_reg_delta = 1e-8;  ///< weight uses (|grad u|^2 + delta^2)^{(p-2)/2}
    double linear_tol = 1e-10;

    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;  ///< relative interior residual of (P_eps) per iterate
    std::vector<double> energy_history;    ///< int A_eps(x,u)|grad u|^p per iterate
    std::vector<double> damping_history;
    double grad_norm = 0.0;                ///< ||grad u||_{L^p}
    double final_residual = 0.0;
    bool converged = false;
    bool experimental = false;             ///< p < 2
    std::string warm_start = "boundary-data";
};

/// Picard failure; carries the report of the attempt.
class PicardError : public SolverError {
public:
    PicardError(const std::string& what, SolveReport report)
        : SolverError(what, report.final_residual), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// Damped Picard iteration for the eps-regularized problem.
///
/// Each step freezes the element weight A_eps(x, u^k)(|grad u^k|^2 + delta^2)^{(p-2)/2} and the
/// load f_eps(x, u^k) at the quadrature points, solves the linear Dirichlet problem with data g,
/// and relaxes u^{k+1} = (1 - theta) u^k + theta u~. theta halves (down to min_damping) after
/// five consecutive energy increases. Throws ValidationError for invalid specs and PicardError
/// on non-convergence.
std::pair<DiscreteField, SolveReport> solve_regularized(
    const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh, double eps, const SolveOptions& opts,
    const std::optional<DiscreteField>& warm_start = std::nullopt);

/// Same, on the mesh built from spec.domain.
std::pair<DiscreteField, SolveReport> solve_regularized(
    const ProblemSpec& spec, double eps, const SolveOptions& opts,
    const std::optional<DiscreteField>& warm_start = std::nullopt);

/// int A_eps(x,u)|grad u|^p.
double regularized_energy(const ProblemSpec& spec, const DiscreteField& u, double eps);

struct ContinuationReport {
    std::vector<double> eps_values;
    std::vector<DiscreteField> fields;
    std::vector<SolveReport> reports;
    std::vector<double> cauchy_gaps;     ///< ||u_j - u_{j+1}||_{L^p}
    std::vector<double> split_checks;    ///< max |u - (U_plus - U_minus)|
    std::vector<double> plus_part_gaps;  ///< ||U_plus - u^+||_inf
    std::vector<double> grad_norms;
    /// max grad_norm <= (1 + 1e-6) * 2 * max(grad_norm_0, grad_norm_1); reported only.
    bool uniform_bound_ok = true;
};

/// Solves every eps of a strictly decreasing schedule, warm-starting each level from the
/// previous one. Throws SolverError naming the failing level.
ContinuationReport epsilon_continuation(const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh,
                                        const std::vector<double>& schedule,
                                        const SolveOptions& opts);
ContinuationReport epsilon_continuation(const ProblemSpec& spec, const std::vector<double>& schedule,
                                        const SolveOptions& opts);

/// Exact two-phase solution on (-1, 1) with f = 0 and u(-1) = -1, u(1) = 1.
struct Oracle1D {
    double x0;
    double slope_plus;
    double slope_minus;

    double operator()(double x) const {
        return x > x0 ? slope_plus * (x - x0) : slope_minus * (x - x0);
    }
};

Oracle1D solve_oracle_1d(double A_plus, double A_minus, double p);

/// Nodewise U_plus = Psi_plus(u), U_minus = Psi_minus(u).
std::pair<DiscreteField, DiscreteField> split_fields(double eps, const DiscreteField& u);

/// Result of w(y) = Phi u(Theta y + x0) + Psi on the unit ball.
struct RescaledProblem {
    DiscreteField w;
    ProblemSpec spec;  ///< A(Theta y + x0) and Phi^{p-1} Theta^p f(Theta y + x0); g = trace of w
};

/// Resamples u from B_Theta(x0) onto a fresh mesh of the same kind and resolution by linear
/// interpolation. The phase of the transformed coefficient follows the sign of w, so the
/// transformed data describe w exactly only when Psi = 0. Throws InvalidParameter when the ball
/// leaves the domain.
RescaledProblem rescale_solution(const ProblemSpec& spec, const DiscreteField& u, double Theta,
                                 double Phi, double Psi, const Point& x0);

}  // namespace qtp
