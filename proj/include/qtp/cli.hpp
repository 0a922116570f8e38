#pragma once

#include "qtp/diagnostics.hpp"
#include "qtp/io.hpp"
#include "qtp/problem.hpp"
#include "qtp/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qtp::cli {

enum class Command { Solve, SweepEpsilon, Diagnose, CompareProfile, OracleCheck, Acceptance };

std::string to_string(Command c);
/// Throws ValidationError("unknown command ...").
Command command_from_string(const std::string& s);

struct DyadicRequest {
    DyadicConfig config;
    bool center_at_zero = false;  ///< replace config.center by the zero of u nearest to it
    std::optional<double> alpha_floor;
};

struct HolderRequest {
    double alpha = 0.9;
    double r = 0.5;
    double R0 = 0.2;
};

struct HarnackRequest {
    Point center{0.0, 0.0};
    std::optional<double> d;  ///< defaults to the free-boundary distance of the centre
    std::optional<double> ceiling;
};

struct ModulusRequest {
    double radius = 1.0;
    std::vector<double> t;
};

struct DiagnosticsConfig {
    std::optional<DyadicRequest> dyadic;
    std::optional<HolderRequest> holder;
    std::vector<HarnackRequest> harnack;
    std::vector<std::pair<double, double>> caccioppoli;
    std::vector<double> caccioppoli_ceilings;  ///< empty or one per radii pair
    std::optional<ModulusRequest> modulus;

    bool needs_sampling() const { return holder.has_value(); }
};

struct RunConfig {
    Command command = Command::Solve;
    ProblemSpec spec;
    SolveOptions options;
    double eps = 1e-3;
    std::vector<double> schedule;  ///< empty means the default geometric schedule
    bool continuation = false;     ///< diagnose: solve along the schedule instead of at eps
    DiagnosticsConfig diagnostics;
    std::vector<double> deltas{0.0, 0.02, 0.05, 0.1, 0.2};
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    bool deterministic = false;  ///< drop wall-clock rows so report.csv is reproducible
    bool write_vtk = true;
};

/// Throws ValidationError for unknown keys, bad types or a missing seed.
RunConfig parse_config(const nlohmann::json& j);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

struct RunResult {
    int status = 0;      ///< 0 ok, 1 contract failure, 2 config or IO error
    std::string reason;  ///< one line, empty on success
    std::vector<io::ReportRow> rows;
};

/// Executes the command and writes report.csv (plus history.csv and field_*.vtk where relevant)
/// into config.out.
RunResult execute(const RunConfig& config);

/// Rows of an eps sweep: per-level split and plus-part gates, Cauchy gaps non-increasing from the
/// second gap on (up to opts.tol_picard) and grad_norm max <= 1.05 median.
void continuation_rows(const ContinuationReport& c, const SolveOptions& opts,
                       std::vector<io::ReportRow>& rows);

/// execute() plus the reason line on `diag`; returns the exit status.
int run(const RunConfig& config, std::ostream& diag);

}  // namespace qtp::cli
