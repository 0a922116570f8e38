#include "qtp/diagnostics.hpp"

#include "qtp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qtp {

double interpolate_at(const DiscreteField& u, const Point& x) {
    const PointLocator locator(u.mesh_ptr());
    const auto loc = locator.locate(x);
    if (!loc) throw MeshError("point outside the mesh");
    return u.at(static_cast<std::size_t>(loc->element), loc->lambda);
}

Point nearest_zero(const DiscreteField& u, const Point& near) {
    const Mesh& mesh = u.mesh();
    const int nv = mesh.vertices_per_element();
    std::optional<Point> best;
    double best_d = std::numeric_limits<double>::infinity();
    const auto consider = [&](const Point& z) {
        const double d = distance(z, near);
        if (d < best_d) {
            best_d = d;
            best = z;
        }
    };
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (u[i] == 0.0) consider(mesh.nodes[i]);
    }
    for (const auto& el : mesh.elements) {
        for (int k = 0; k < nv; ++k) {
            const int a = el[k];
            const int b = el[(k + 1) % nv];
            if ((u[a] > 0.0 && u[b] < 0.0) || (u[a] < 0.0 && u[b] > 0.0)) {
                const double t = u[a] / (u[a] - u[b]);
                const Point& pa = mesh.nodes[a];
                const Point& pb = mesh.nodes[b];
                consider({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])});
            }
        }
    }
    if (!best) throw MeshError("field has no zero");
    return *best;
}

namespace {

/// Distance from x to the nearest node whose value has the opposite-or-zero sign of `sign`.
double distance_to_opposite(const DiscreteField& u, const Point& x, bool positive) {
    const Mesh& mesh = u.mesh();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const bool opposite = positive ? u[i] <= 0.0 : u[i] >= 0.0;
        if (opposite) best = std::min(best, distance(mesh.nodes[i], x));
    }
    return std::isfinite(best) ? best : mesh.domain_diameter();
}

Point domain_center(const Mesh& mesh) {
    return mesh.kind == DomainKind::UnitSquare ? Point{0.5, 0.5} : Point{0.0, 0.0};
}

}  // namespace

double free_boundary_distance(const DiscreteField& u, const Point& x) {
    const double ux = interpolate_at(u, x);
    if (ux == 0.0) throw InvalidParameter("on free boundary");
    return distance_to_opposite(u, x, ux > 0.0);
}

DyadicProfile dyadic_decay_profile(const DiscreteField& u, const DyadicConfig& cfg) {
    if (!(cfg.R0 > 0.0 && cfg.R0 < 1.0)) throw InvalidParameter("R0 must lie in (0, 1)");
    if (cfg.k_max < 1) throw InvalidParameter("k_max must be at least 1");
    const Mesh& mesh = u.mesh();
    const double smallest = std::pow(cfg.R0, cfg.k_max);
    if (smallest < mesh.h_mesh) {
        throw InvalidParameter("dyadic depth under-resolved: R0^k_max below h_mesh");
    }

    const double uc = interpolate_at(u, cfg.center);
    std::vector<double> shifted(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) shifted[i] = u[i] - uc;
    const DiscreteField w(u.mesh_ptr(), std::move(shifted));

    DyadicProfile out;
    out.well_resolved = smallest >= 4.0 * mesh.h_mesh;
    for (int k = 1; k <= cfg.k_max; ++k) {
        const double r = std::pow(cfg.R0, k);
        out.radii.push_back(r);
        out.sups.push_back(sup_on_ball(w, cfg.center, r));
    }

    const double scale = *std::max_element(out.sups.begin(), out.sups.end());
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < out.sups.size(); ++k) {
        if (out.sups[k] < 10.0 * std::numeric_limits<double>::epsilon() * scale || out.sups[k] == 0.0) {
            continue;
        }
        xs.push_back(std::log(out.radii[k]));
        ys.push_back(std::log(out.sups[k]));
    }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxy += (xs[k] - mx) * (ys[k] - my);
            sxx += (xs[k] - mx) * (xs[k] - mx);
        }
        out.fitted_alpha = sxy / sxx;
    }
    return out;
}

double source_norm(const ProblemSpec& spec, const Mesh& mesh, std::optional<Ball> region) {
    const auto& rule = quadrature_rule(mesh.dim);
    const double N = mesh.dim;
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (region && !region->contains(mesh.barycenter(e))) continue;
        for (const auto& q : rule) {
            const double F = std::abs(spec.f_plus.at(mesh, e, q.lambda)) +
                             std::abs(spec.f_minus.at(mesh, e, q.lambda));
            sum += q.weight * mesh.measures[e] * std::pow(F, N);
        }
    }
    return std::pow(sum, 1.0 / N);
}

HolderTable holder_report(const DiscreteField& u, const ProblemSpec& spec, double alpha, double r,
                          const HolderReportOptions& opts) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidParameter("r must lie in (0, 1)");
    const Mesh& mesh = u.mesh();
    const Ball region{domain_center(mesh), r};
    const auto pairs = sample_pairs(u, region, opts.sampling);

    std::vector<double> d(mesh.node_count(), 0.0);
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (u[i] != 0.0 && region.contains(mesh.nodes[i])) {
            d[i] = distance_to_opposite(u, mesh.nodes[i], u[i] > 0.0);
        }
    }

    HolderTable table;
    table.strata = {
        {0.0, opts.R0 / 8.0, 0.0, 0},
        {opts.R0 / 8.0, opts.R0, 0.0, 0},
        {opts.R0, std::numeric_limits<double>::infinity(), 0.0, 0},
    };
    for (const auto& [i, j] : pairs) {
        const double dist = distance(mesh.nodes[i], mesh.nodes[j]);
        if (dist == 0.0) continue;
        const double q = std::abs(u[i] - u[j]) / std::pow(dist, alpha);
        table.global_seminorm = std::max(table.global_seminorm, q);
        const double dmin = std::min(d[i], d[j]);
        for (auto& stratum : table.strata) {
            if (dmin >= stratum.lower && dmin < stratum.upper) {
                stratum.seminorm = std::max(stratum.seminorm, q);
                ++stratum.pairs;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) table.sup_norm = std::max(table.sup_norm, std::abs(u[i]));
    table.source_norm = source_norm(spec, mesh, std::nullopt);
    const double denom = table.sup_norm + std::pow(table.source_norm, 1.0 / (spec.p - 1.0));
    table.constant_quotient =
        denom > 0.0 ? table.global_seminorm * std::pow(1.0 - r, alpha) / denom : 0.0;
    return table;
}

HarnackRow harnack_ratio(const DiscreteField& u, const ProblemSpec& spec, const Point& center,
                         double d) {
    if (!(d > 0.0)) throw InvalidParameter("d must be positive");
    const Mesh& mesh = u.mesh();
    const Ball outer{center, d / 4.0};
    const Ball inner{center, d / 8.0};
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (!outer.contains(mesh.nodes[i])) continue;
        if (!(u[i] > 0.0)) throw InvalidParameter("not in positive phase");
        sup = std::max(sup, u[i]);
        if (inner.contains(mesh.nodes[i])) inf = std::min(inf, u[i]);
    }
    if (!std::isfinite(sup) || !std::isfinite(inf)) throw MeshError("ball under-resolved");
    const double F = source_norm(spec, mesh, outer);
    const double source = d * std::pow(F, 1.0 / (spec.p - 1.0));
    return {center, d, sup, inf, source, sup / (inf + source)};
}

CaccioppoliRow caccioppoli_check(const DiscreteField& u, const ProblemSpec& spec, double s, double t) {
    if (!(s >= 0.5 && s < t && t <= 1.0)) {
        throw InvalidParameter("caccioppoli radii need 1/2 <= s < t <= 1");
    }
    const Point c = domain_center(u.mesh());
    const double inner = gradient_energy(u, spec.p, Ball{c, s});
    const double outer = gradient_energy(u, spec.p, Ball{c, t});
    CaccioppoliRow row{s, t, inner, outer - inner, 1.0 / std::pow(t - s, spec.p), 1.0, 0.0};
    row.constant = row.lhs / (row.annulus_energy + row.gap_term + row.source_term);
    return row;
}

ProblemSpec perturbed_spec(const ProblemSpec& base, double delta) {
    const auto A_plus0 = base.A_plus.constant_value();
    const auto A_minus0 = base.A_minus.constant_value();
    if (!A_plus0 || !A_minus0) {
        throw InvalidParameter("compactness experiment needs constant base coefficients");
    }
    const int N = base.domain.kind == DomainKind::Interval ? 1 : 2;
    const double ball_measure = N == 1 ? 2.0 : std::numbers::pi;
    const auto bump = [](const Point& x) { return 0.5 * (1.0 + std::cos(std::numbers::pi * norm(x))); };

    ProblemSpec s = base;
    if (delta == 0.0) {
        s.f_plus = ScalarField::constant(0.0);
        s.f_minus = ScalarField::constant(0.0);
        return s;
    }
    s.A_plus = ScalarField::function(
        [a = *A_plus0, delta, bump](const Point& x) { return a + delta * bump(x); }, "perturbed A_plus");
    s.A_minus = ScalarField::function(
        [a = *A_minus0, delta, bump](const Point& x) { return a + delta * bump(x); }, "perturbed A_minus");
    const double f = delta * std::pow(ball_measure, -1.0 / N);
    s.f_plus = ScalarField::constant(f);
    s.f_minus = ScalarField::constant(f);
    return s;
}

std::vector<ProximityRow> compactness_experiment(const ProblemSpec& base,
                                                 const std::vector<double>& delta_list, double eps,
                                                 const SolveOptions& opts) {
    if (base.domain.kind != DomainKind::UnitDisc && base.domain.kind != DomainKind::Interval) {
        throw InvalidParameter("compactness experiment runs on the unit ball");
    }
    auto mesh = std::make_shared<const Mesh>(build_mesh(base.domain));
    const SubMesh half = extract_ball_submesh(*mesh, {0.0, 0.0}, 0.5);

    // Continuation from a wide ramp down to eps.
    std::vector<double> schedule;
    for (double e = 0.5; e > eps * (1.0 + 1e-12); e *= 0.5) schedule.push_back(e);
    schedule.push_back(eps);

    std::vector<ProximityRow> rows;
    for (double delta : delta_list) {
        ProximityRow row;
        row.delta = delta;
        try {
            const ProblemSpec spec = perturbed_spec(base, delta);
            const auto continuation = epsilon_continuation(spec, mesh, schedule, opts);
            const DiscreteField& u = continuation.fields.back();

            std::vector<double> restricted(half.node_map.size());
            for (std::size_t i = 0; i < restricted.size(); ++i) restricted[i] = u[half.node_map[i]];
            const DiscreteField trace(half.mesh, std::move(restricted));

            const Point origin{0.0, 0.0};
            const FrozenCoefficients frozen{spec.A_plus.at_point(origin), spec.A_minus.at_point(origin),
                                            spec.p};
            const DiscreteField h = make_regular_profile(frozen, trace, opts);

            double sup = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (norm(half.mesh->nodes[i]) <= 0.25 + 1e-12) {
                    sup = std::max(sup, std::abs(trace[i] - h[i]));
                }
            }
            row.proximity = sup;
        } catch (const Error& e) {
            row.failed = true;
            row.reason = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

ModulusOfContinuity::ModulusOfContinuity(const ScalarField& A_plus, const ScalarField& A_minus,
                                         const Mesh& mesh, const Ball& region,
                                         std::size_t max_nodes) {
    std::vector<int> nodes;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (region.contains(mesh.nodes[i])) nodes.push_back(static_cast<int>(i));
    }
    if (nodes.size() > max_nodes) {
        std::vector<int> thinned;
        const double stride = static_cast<double>(nodes.size()) / max_nodes;
        for (std::size_t k = 0; k < max_nodes; ++k) thinned.push_back(nodes[static_cast<std::size_t>(k * stride)]);
        nodes = std::move(thinned);
    }
    std::vector<double> ap(nodes.size()), am(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        ap[k] = A_plus.at_node(mesh, nodes[k]);
        am[k] = A_minus.at_node(mesh, nodes[k]);
    }
    std::vector<std::pair<double, double>> table;
    table.reserve(nodes.size() * (nodes.size() - (nodes.empty() ? 0 : 1)) / 2);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            table.emplace_back(distance(mesh.nodes[nodes[i]], mesh.nodes[nodes[j]]),
                               std::max(std::abs(ap[i] - ap[j]), std::abs(am[i] - am[j])));
        }
    }
    std::sort(table.begin(), table.end());
    distances_.reserve(table.size());
    cumulative_.reserve(table.size());
    double running = 0.0;
    for (const auto& [dist, osc] : table) {
        running = std::max(running, osc);
        distances_.push_back(dist);
        cumulative_.push_back(running);
    }
}

double ModulusOfContinuity::operator()(double t) const {
    if (!(t > 0.0)) throw InvalidParameter("t must be positive");
    const auto it = std::lower_bound(distances_.begin(), distances_.end(), t);
    if (it == distances_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - distances_.begin()) - 1];
}

double modulus_of_continuity(const ScalarField& A_plus, const ScalarField& A_minus,
                             const Mesh& mesh, const Ball& region, double t) {
    return ModulusOfContinuity(A_plus, A_minus, mesh, region)(t);
}

}  // namespace qtp
