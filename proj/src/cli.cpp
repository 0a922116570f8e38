#include "qtp/cli.hpp"

#include "qtp/acceptance.hpp"
#include "qtp/error.hpp"
#include "qtp/fem.hpp"
#include "qtp/mollifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace qtp::cli {

namespace {

using nlohmann::json;
using io::ReportRow;

constexpr std::array<std::pair<Command, const char*>, 6> kCommandNames{{
    {Command::Solve, "solve"},
    {Command::SweepEpsilon, "sweep-epsilon"},
    {Command::Diagnose, "diagnose"},
    {Command::CompareProfile, "compare-profile"},
    {Command::OracleCheck, "oracle-check"},
    {Command::Acceptance, "acceptance"},
}};

std::string fmt(double x) { return io::format_double(x); }
std::string label(double x) { return io::format_label(x); }

ReportRow info(std::string name, double value) { return {std::move(name), value, "", std::nullopt}; }

ReportRow gate_le(std::string name, double value, double bound) {
    return {std::move(name), value, "<= " + fmt(bound), value <= bound};
}

ReportRow gate_ge(std::string name, double value, double bound) {
    return {std::move(name), value, ">= " + fmt(bound), value >= bound};
}

Point point_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.empty() || v.size() > 2) throw ValidationError("points have one or two coordinates");
    return {v[0], v.size() == 2 ? v[1] : 0.0};
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

SolveOptions options_from_json(const json& j) {
    reject_unknown(j, {"tol_picard", "max_picard", "damping", "min_damping", "grad_reg_delta", "linear_tol"},
                   "solve");
    SolveOptions o;
    o.tol_picard = j.value("tol_picard", o.tol_picard);
    o.max_picard = j.value("max_picard", o.max_picard);
    o.damping = j.value("damping", o.damping);
    o.min_damping = j.value("min_damping", o.min_damping);
    o.grad_reg_delta = j.value("grad_reg_delta", o.grad_reg_delta);
    o.linear_tol = j.value("linear_tol", o.linear_tol);
    o.validate();
    return o;
}

DiagnosticsConfig diagnostics_from_json(const json& j) {
    reject_unknown(j, {"dyadic", "holder", "harnack", "caccioppoli", "caccioppoli_ceilings", "modulus"},
                   "diagnostics");
    DiagnosticsConfig d;
    if (j.contains("dyadic")) {
        const json& k = j.at("dyadic");
        reject_unknown(k, {"R0", "alpha", "k_max", "center", "alpha_floor"}, "dyadic");
        DyadicRequest r;
        r.config.R0 = k.value("R0", r.config.R0);
        r.config.alpha = k.value("alpha", r.config.alpha);
        r.config.k_max = k.value("k_max", r.config.k_max);
        if (k.contains("center")) {
            if (k.at("center").is_string()) {
                if (k.at("center").get<std::string>() != "zero") {
                    throw ValidationError("dyadic center is a point or \"zero\"");
                }
                r.center_at_zero = true;
            } else {
                r.config.center = point_from_json(k.at("center"));
            }
        }
        if (k.contains("alpha_floor")) r.alpha_floor = k.at("alpha_floor").get<double>();
        d.dyadic = r;
    }
    if (j.contains("holder")) {
        const json& k = j.at("holder");
        reject_unknown(k, {"alpha", "r", "R0"}, "holder");
        HolderRequest r;
        r.alpha = k.value("alpha", r.alpha);
        r.r = k.value("r", r.r);
        r.R0 = k.value("R0", r.R0);
        d.holder = r;
    }
    if (j.contains("harnack")) {
        for (const json& k : j.at("harnack")) {
            reject_unknown(k, {"center", "d", "ceiling"}, "harnack");
            HarnackRequest r;
            r.center = point_from_json(k.at("center"));
            if (k.contains("d")) r.d = k.at("d").get<double>();
            if (k.contains("ceiling")) r.ceiling = k.at("ceiling").get<double>();
            d.harnack.push_back(r);
        }
    }
    if (j.contains("caccioppoli")) {
        for (const json& k : j.at("caccioppoli")) {
            const auto st = k.get<std::vector<double>>();
            if (st.size() != 2) throw ValidationError("caccioppoli entries are [s, t] pairs");
            d.caccioppoli.emplace_back(st[0], st[1]);
        }
    }
    if (j.contains("caccioppoli_ceilings")) {
        d.caccioppoli_ceilings = j.at("caccioppoli_ceilings").get<std::vector<double>>();
        if (d.caccioppoli_ceilings.size() != d.caccioppoli.size()) {
            throw ValidationError("one caccioppoli ceiling per radii pair");
        }
    }
    if (j.contains("modulus")) {
        const json& k = j.at("modulus");
        reject_unknown(k, {"radius", "t"}, "modulus");
        ModulusRequest r;
        r.radius = k.value("radius", r.radius);
        r.t = k.at("t").get<std::vector<double>>();
        d.modulus = r;
    }
    return d;
}

// Writers ------------------------------------------------------------------------------------

void write_field(const RunConfig& cfg, const DiscreteField& u, const std::string& name) {
    if (cfg.write_vtk) io::write_vtk(cfg.out / ("field_" + name + ".vtk"), u, name);
}

void write_history(const RunConfig& cfg, const SolveReport& report) {
    std::vector<std::vector<std::string>> records;
    for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
        records.push_back({std::to_string(k + 1), fmt(report.residual_history[k]),
                           fmt(report.energy_history[k]), fmt(report.damping_history[k])});
    }
    io::atomic_write(cfg.out / "history.csv",
                     io::csv_text({"iteration", "residual", "energy", "damping"}, records));
}

std::vector<double> schedule_of(const RunConfig& cfg) {
    return cfg.schedule.empty() ? mollifier::geometric_schedule() : cfg.schedule;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void solve_rows(const SolveReport& r, std::vector<ReportRow>& rows, const std::string& prefix = "") {
    rows.push_back(info(prefix + "iterations", r.iterations));
    rows.push_back(info(prefix + "final_residual", r.final_residual));
    rows.push_back(info(prefix + "grad_norm", r.grad_norm));
    if (r.experimental) rows.push_back(info(prefix + "experimental", 1.0));
}

// Commands -----------------------------------------------------------------------------------

std::vector<ReportRow> cmd_solve(const RunConfig& cfg) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(cfg.spec.domain));
    std::vector<ReportRow> rows;
    try {
        auto [u, report] = solve_regularized(cfg.spec, mesh, cfg.eps, cfg.options);
        rows.push_back({"converged", 1.0, "== 1", true});
        solve_rows(report, rows);
        rows.push_back(info("energy", regularized_energy(cfg.spec, u, cfg.eps)));
        write_history(cfg, report);
        write_field(cfg, u, "u");
    } catch (const PicardError& e) {
        rows.push_back({"converged", 0.0, "== 1", false});
        solve_rows(e.report(), rows);
        write_history(cfg, e.report());
    }
    return rows;
}

}  // namespace

void continuation_rows(const ContinuationReport& c, const SolveOptions& opts,
                       std::vector<ReportRow>& rows) {
    const std::size_t n = c.eps_values.size();
    for (std::size_t j = 0; j < n; ++j) {
        const std::string s = "_" + std::to_string(j);
        const double eps = c.eps_values[j];
        rows.push_back(info("eps" + s, eps));
        rows.push_back(info("iterations" + s, c.reports[j].iterations));
        rows.push_back(gate_le("split_check" + s, c.split_checks[j], 1e-12));
        rows.push_back(gate_le("plus_part_gap" + s, c.plus_part_gaps[j], eps / 2.0 + 1e-12));
        rows.push_back(info("grad_norm" + s, c.grad_norms[j]));
    }
    // cauchy_gap_j = ||u_j - u_{j-1}||; non-increasing from j = 2 on, up to the solver tolerance.
    for (std::size_t j = 1; j < n; ++j) {
        const double gap = c.cauchy_gaps[j - 1];
        const std::string name = "cauchy_gap_" + std::to_string(j);
        if (j >= 3) {
            const double previous = c.cauchy_gaps[j - 2];
            rows.push_back({name, gap, "<= cauchy_gap_" + std::to_string(j - 1),
                            gap <= previous + opts.tol_picard});
        } else {
            rows.push_back(info(name, gap));
        }
    }
    std::vector<double> g = c.grad_norms;
    std::sort(g.begin(), g.end());
    const double median = g.size() % 2 ? g[g.size() / 2] : 0.5 * (g[g.size() / 2 - 1] + g[g.size() / 2]);
    rows.push_back(gate_le("grad_norm_max_over_median", g.back() / median, 1.05));
    rows.push_back(info("grad_norm_range_over_median", (g.back() - g.front()) / median));
    rows.push_back(info("uniform_bound_ok", c.uniform_bound_ok ? 1.0 : 0.0));
}

namespace {

std::vector<ReportRow> cmd_sweep(const RunConfig& cfg) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(cfg.spec.domain));
    const auto c = epsilon_continuation(cfg.spec, mesh, schedule_of(cfg), cfg.options);
    std::vector<ReportRow> rows;
    continuation_rows(c, cfg.options, rows);
    write_field(cfg, c.fields.back(), "u");
    return rows;
}

std::vector<ReportRow> cmd_diagnose(const RunConfig& cfg) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(cfg.spec.domain));
    std::vector<ReportRow> rows;
    std::optional<DiscreteField> solved;
    if (cfg.continuation) {
        auto c = epsilon_continuation(cfg.spec, mesh, schedule_of(cfg), cfg.options);
        solve_rows(c.reports.back(), rows);
        solved = std::move(c.fields.back());
    } else {
        auto [u, report] = solve_regularized(cfg.spec, mesh, cfg.eps, cfg.options);
        solve_rows(report, rows);
        solved = std::move(u);
    }
    const DiscreteField& u = *solved;
    const DiagnosticsConfig& d = cfg.diagnostics;

    if (d.dyadic) {
        DyadicConfig dc = d.dyadic->config;
        if (d.dyadic->center_at_zero) dc.center = nearest_zero(u, dc.center);
        rows.push_back(info("dyadic_center_x1", dc.center[0]));
        rows.push_back(info("dyadic_center_x2", dc.center[1]));
        const auto prof = dyadic_decay_profile(u, dc);
        for (std::size_t k = 0; k < prof.sups.size(); ++k) {
            rows.push_back(info("dyadic_M_" + std::to_string(k + 1), prof.sups[k]));
        }
        bool nonincreasing = true;
        for (std::size_t k = 1; k < prof.sups.size(); ++k) nonincreasing &= prof.sups[k] <= prof.sups[k - 1];
        rows.push_back({"dyadic_nonincreasing", nonincreasing ? 1.0 : 0.0, "== 1", nonincreasing});
        rows.push_back(info("dyadic_well_resolved", prof.well_resolved ? 1.0 : 0.0));
        if (d.dyadic->alpha_floor) {
            rows.push_back(gate_ge("fitted_alpha", prof.fitted_alpha, *d.dyadic->alpha_floor));
        } else {
            rows.push_back(info("fitted_alpha", prof.fitted_alpha));
        }
    }
    if (d.holder) {
        HolderReportOptions ho;
        ho.R0 = d.holder->R0;
        ho.sampling.seed = *cfg.seed;
        const auto table = holder_report(u, cfg.spec, d.holder->alpha, d.holder->r, ho);
        const char* names[] = {"holder_near", "holder_middle", "holder_far"};
        for (std::size_t s = 0; s < table.strata.size(); ++s) {
            rows.push_back(info(std::string(names[s]) + "_seminorm", table.strata[s].seminorm));
            rows.push_back(info(std::string(names[s]) + "_pairs", static_cast<double>(table.strata[s].pairs)));
        }
        rows.push_back(info("holder_global_seminorm", table.global_seminorm));
        rows.push_back(info("holder_sup_norm", table.sup_norm));
        rows.push_back(info("holder_source_norm", table.source_norm));
        rows.push_back(info("holder_constant_quotient", table.constant_quotient));
        const double ratio = table.global_seminorm > 0.0 ? table.strata[0].seminorm / table.global_seminorm : 0.0;
        rows.push_back(gate_le("holder_near_over_global", ratio, 1.1));
    }
    for (std::size_t i = 0; i < d.harnack.size(); ++i) {
        const auto& h = d.harnack[i];
        const double dist = h.d ? *h.d : free_boundary_distance(u, h.center);
        const auto row = harnack_ratio(u, cfg.spec, h.center, dist);
        const std::string s = "_" + std::to_string(i);
        rows.push_back(info("harnack_d" + s, row.d));
        rows.push_back(info("harnack_sup" + s, row.sup_outer));
        rows.push_back(info("harnack_inf" + s, row.inf_inner));
        rows.push_back(info("harnack_source" + s, row.source_term));
        rows.push_back(h.ceiling ? gate_le("harnack_ratio" + s, row.ratio, *h.ceiling)
                                 : info("harnack_ratio" + s, row.ratio));
    }
    if (!d.caccioppoli.empty()) {
        const double half = gradient_energy(u, cfg.spec.p, Ball{{0.0, 0.0}, 0.5});
        rows.push_back({"energy_half_ball", half, "finite", std::isfinite(half)});
    }
    for (std::size_t i = 0; i < d.caccioppoli.size(); ++i) {
        const auto [s, t] = d.caccioppoli[i];
        const auto row = caccioppoli_check(u, cfg.spec, s, t);
        const std::string sfx = "_" + label(s) + "_" + label(t);
        rows.push_back(info("caccioppoli_lhs" + sfx, row.lhs));
        rows.push_back(info("caccioppoli_annulus" + sfx, row.annulus_energy));
        rows.push_back(info("caccioppoli_gap" + sfx, row.gap_term));
        if (d.caccioppoli_ceilings.empty()) {
            rows.push_back(info("caccioppoli_constant" + sfx, row.constant));
        } else {
            const double c = d.caccioppoli_ceilings[i];
            const double rhs = c * (row.annulus_energy + row.gap_term + row.source_term);
            rows.push_back(info("caccioppoli_constant" + sfx, row.constant));
            rows.push_back({"caccioppoli_bound" + sfx, row.lhs, "<= " + fmt(rhs), row.lhs <= rhs});
        }
    }
    if (d.modulus) {
        const ModulusOfContinuity omega(cfg.spec.A_plus, cfg.spec.A_minus, *mesh,
                                        Ball{{0.0, 0.0}, d.modulus->radius});
        for (double t : d.modulus->t) rows.push_back(info("omega_" + label(t), omega(t)));
    }
    write_field(cfg, u, "u");
    return rows;
}

std::vector<ReportRow> cmd_compare(const RunConfig& cfg) {
    const auto table = compactness_experiment(cfg.spec, cfg.deltas, cfg.eps, cfg.options);
    std::vector<ReportRow> rows;
    bool monotone = true;
    double previous = -1.0;
    for (const auto& r : table) {
        const std::string name = "proximity_" + label(r.delta);
        if (r.failed) {
            rows.push_back({name, r.proximity, "solved", false});
            monotone = false;
            continue;
        }
        if (r.delta == 0.0) {
            rows.push_back(gate_le(name, r.proximity, 10.0 * cfg.options.tol_picard));
        } else {
            rows.push_back(info(name, r.proximity));
        }
        monotone &= r.proximity >= previous;
        previous = r.proximity;
    }
    rows.push_back({"proximity_monotone", monotone ? 1.0 : 0.0, "== 1", monotone});
    return rows;
}

std::vector<ReportRow> cmd_oracle(const RunConfig& cfg) {
    const ProblemSpec& s = cfg.spec;
    const auto ap = s.A_plus.constant_value();
    const auto am = s.A_minus.constant_value();
    if (s.domain.kind != DomainKind::Interval || !ap || !am) {
        throw ValidationError("oracle-check needs an interval with constant A_plus and A_minus");
    }
    if (s.f_plus.constant_value() != 0.0 || s.f_minus.constant_value() != 0.0) {
        throw ValidationError("oracle-check needs f = 0");
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto mesh = std::make_shared<const Mesh>(build_mesh(s.domain));
    auto [u, report] = solve_regularized(s, mesh, cfg.eps, cfg.options);
    const Oracle1D oracle = solve_oracle_1d(*ap, *am, s.p);
    double err = 0.0;
    std::vector<double> exact(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        exact[i] = oracle(mesh->nodes[i][0]);
        err = std::max(err, std::abs(u[i] - exact[i]));
    }
    const double x0 = nearest_zero(u, {0.0, 0.0})[0];
    const double tol = 2.0 / s.domain.resolution;
    std::vector<ReportRow> rows;
    solve_rows(report, rows);
    rows.push_back(gate_le("max_nodal_error", err, tol));
    rows.push_back(info("interface_location", x0));
    rows.push_back(info("oracle_interface_location", oracle.x0));
    rows.push_back(gate_le("interface_error", std::abs(x0 - oracle.x0), tol));
    if (!cfg.deterministic) rows.push_back(info("runtime_seconds", seconds_since(t0)));
    write_field(cfg, u, "u");
    write_field(cfg, DiscreteField(mesh, std::move(exact)), "oracle");
    return rows;
}

std::vector<ReportRow> cmd_acceptance(const RunConfig& cfg) {
    std::vector<ReportRow> rows;
    acceptance::Options opts;
    opts.seed = *cfg.seed;
    for (int id : cfg.criteria) {
        const auto result = acceptance::run_criterion(id, opts);
        const std::string prefix = "c" + std::to_string(id) + ".";
        rows.push_back({"criterion_" + std::to_string(id), result.pass ? 1.0 : 0.0, "== 1", result.pass});
        for (const auto& r : result.rows) {
            if (cfg.deterministic && r.name == "runtime_seconds") continue;
            ReportRow copy = r;
            copy.name = prefix + r.name;
            rows.push_back(std::move(copy));
        }
    }
    return rows;
}

std::vector<ReportRow> dispatch(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::Solve: return cmd_solve(cfg);
        case Command::SweepEpsilon: return cmd_sweep(cfg);
        case Command::Diagnose: return cmd_diagnose(cfg);
        case Command::CompareProfile: return cmd_compare(cfg);
        case Command::OracleCheck: return cmd_oracle(cfg);
        case Command::Acceptance: return cmd_acceptance(cfg);
    }
    throw ValidationError("unknown command");
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [cmd, name] : kCommandNames) {
        if (cmd == c) return name;
    }
    return "unknown";
}

Command command_from_string(const std::string& s) {
    for (const auto& [cmd, name] : kCommandNames) {
        if (s == name) return cmd;
    }
    throw ValidationError("unknown command '" + s + "'");
}

RunConfig parse_config(const json& j) {
    try {
        if (!j.is_object()) throw ValidationError("config must be a JSON object");
        reject_unknown(j, {"command", "spec", "solve", "eps", "schedule", "continuation", "diagnostics",
                           "deltas", "criteria", "out", "seed", "deterministic", "vtk"},
                       "config");
        RunConfig cfg;
        cfg.command = command_from_string(j.at("command").get<std::string>());
        if (j.contains("spec")) {
            cfg.spec = spec_from_json(j.at("spec"));
        } else if (cfg.command != Command::Acceptance) {
            throw ValidationError("config needs a spec");
        }
        if (j.contains("solve")) cfg.options = options_from_json(j.at("solve"));
        cfg.eps = j.value("eps", cfg.eps);
        if (!(cfg.eps > 0.0)) throw ValidationError("eps must be positive");
        if (j.contains("schedule")) {
            const json& s = j.at("schedule");
            if (s.is_array()) {
                cfg.schedule = s.get<std::vector<double>>();
            } else {
                reject_unknown(s, {"eps0", "levels"}, "schedule");
                mollifier::Schedule sch;
                sch.eps0 = s.value("eps0", sch.eps0);
                sch.levels = s.value("levels", sch.levels);
                cfg.schedule = mollifier::geometric_schedule(sch);
            }
        }
        cfg.continuation = j.value("continuation", cfg.continuation);
        if (j.contains("diagnostics")) cfg.diagnostics = diagnostics_from_json(j.at("diagnostics"));
        if (j.contains("deltas")) cfg.deltas = j.at("deltas").get<std::vector<double>>();
        if (j.contains("criteria")) {
            cfg.criteria = j.at("criteria").get<std::vector<int>>();
            for (int id : cfg.criteria) {
                if (id < 1 || id > acceptance::kCriterionCount) {
                    throw ValidationError("no acceptance criterion " + std::to_string(id));
                }
            }
        }
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.deterministic = j.value("deterministic", cfg.deterministic);
        cfg.write_vtk = j.value("vtk", cfg.write_vtk);
        return cfg;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    return parse_config(j);
}

RunResult execute(const RunConfig& config) {
    RunResult result;
    try {
        const bool sampling = config.command == Command::Acceptance ||
                              (config.command == Command::Diagnose && config.diagnostics.needs_sampling());
        if (sampling && !config.seed) throw ValidationError("seed required for pair sampling");
        if (config.command != Command::Acceptance) {
            const auto violations = validate_spec(config.spec);
            if (!violations.empty()) {
                return {2, one_line("spec validation failed: " + violations.front().message), {}};
            }
        }
        std::error_code ec;
        std::filesystem::create_directories(config.out, ec);
        if (ec || !std::filesystem::is_directory(config.out)) {
            throw IoError("output directory not writable: " + config.out.string());
        }
        result.rows = dispatch(config);
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        const bool spec = what.rfind("spec validation failed", 0) == 0;
        return {2, one_line(spec ? what : "config error: " + what), {}};
    } catch (const IoError& e) {
        return {2, one_line(std::string("io error: ") + e.what()), {}};
    } catch (const SolverError& e) {
        result.status = 1;
        result.reason = one_line(std::string("solver failed: ") + e.what());
    } catch (const Error& e) {
        return {2, one_line(std::string("config error: ") + e.what()), {}};
    }

    try {
        io::write_report(config.out / "report.csv", result.rows);
    } catch (const IoError& e) {
        return {2, one_line(std::string("io error: ") + e.what()), result.rows};
    }
    if (result.status == 0) {
        std::vector<std::string> failed;
        for (const auto& r : result.rows) {
            if (r.pass && !*r.pass) failed.push_back(r.name);
        }
        if (!failed.empty()) {
            std::string names;
            for (const auto& n : failed) names += (names.empty() ? "" : ",") + n;
            result.status = 1;
            result.reason = "contract failed: " + names;
        }
    }
    return result;
}

int run(const RunConfig& config, std::ostream& diag) {
    const RunResult result = execute(config);
    if (!result.reason.empty()) diag << result.reason << '\n';
    return result.status;
}

}  // namespace qtp::cli
