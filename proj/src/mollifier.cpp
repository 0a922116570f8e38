#include "qtp/mollifier.hpp"

#include "qtp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qtp::mollifier {

namespace {

void require_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidParameter("eps must be positive, got " + std::to_string(eps));
    }
}

}  // namespace

double psi_plus(double eps, double t) {
    require_eps(eps);
    if (t <= 0.0) return 0.0;
    if (t >= eps) return 1.0;
    return t / eps;
}

double psi_minus(double eps, double t) {
    return 1.0 - psi_plus(eps, t);
}

double Psi_plus(double eps, double t) {
    require_eps(eps);
    if (t <= 0.0) return 0.0;
    if (t < eps) return t * t / (2.0 * eps);
    return t - 0.5 * eps;
}

double Psi_minus(double eps, double t) {
    return Psi_plus(eps, t) - t;
}

double a_eps(double eps, double A_plus, double A_minus, double p, double s) {
    if (!(p > 1.0)) throw InvalidParameter("p must exceed 1");
    const double plus = psi_plus(eps, s);
    const double minus = 1.0 - plus;
    if (p == 2.0) return A_plus * plus + A_minus * minus;
    return A_plus * std::pow(plus, p - 1.0) + A_minus * std::pow(minus, p - 1.0);
}

double f_eps(double eps, double f_plus, double f_minus, double s) {
    const double plus = psi_plus(eps, s);
    return f_plus * plus + f_minus * (1.0 - plus);
}

std::vector<double> geometric_schedule(const Schedule& schedule) {
    require_eps(schedule.eps0);
    if (schedule.levels < 1) throw InvalidParameter("schedule needs at least one level");
    std::vector<double> eps(schedule.levels);
    for (int j = 0; j < schedule.levels; ++j) eps[j] = std::ldexp(schedule.eps0, -j);
    return eps;
}

}  // namespace qtp::mollifier
