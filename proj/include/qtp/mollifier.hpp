#pragma once

#include <vector>

namespace qtp::mollifier {

// Width-eps ramp smoothing of the phase indicators. All functions throw InvalidParameter
// when eps <= 0 (or p <= 1 for a_eps).

/// clamp(t / eps, 0, 1)
double psi_plus(double eps, double t);
/// 1 - psi_plus(eps, t)
double psi_minus(double eps, double t);
/// Antiderivative of psi_plus vanishing at -infinity:
/// 0 for t <= 0, t^2 / (2 eps) on (0, eps), t - eps / 2 for t >= eps.
double Psi_plus(double eps, double t);
/// Psi_plus(eps, t) - t
double Psi_minus(double eps, double t);

/// Smoothed coefficient A_plus psi_plus^(p-1) + A_minus psi_minus^(p-1).
double a_eps(double eps, double A_plus, double A_minus, double p, double s);
/// Smoothed source f_plus psi_plus + f_minus psi_minus.
double f_eps(double eps, double f_plus, double f_minus, double s);

/// Geometric schedule eps_j = eps0 * 2^-j, j = 0..levels-1.
struct Schedule {
    double eps0 = 0.5;
    int levels = 8;
};

std::vector<double> geometric_schedule(const Schedule& schedule = {});

}  // namespace qtp::mollifier
