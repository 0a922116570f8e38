#pragma once

#include "qtp/io.hpp"
#include "qtp/problem.hpp"
#include "qtp/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qtp::acceptance {

/// Shipped cases.
/// Two-phase interval case: A_plus = 4, A_minus = 1, f = 0, g = x1.
ProblemSpec oracle_case(double p, int n);
/// Two-phase disc case: p = 2, A_plus = 2, A_minus = 0.5, f_plus = 1, f_minus = -1, g = x1.
ProblemSpec disc_case(int rings);
/// Mollification width used for the interval cases.
inline constexpr double kOracleEps = 1e-3;
/// Picard cap for the interval cases; p = 3 on the refined mesh needs more than the default.
inline constexpr int kOracleMaxPicard = 1000;

struct Options {
    std::uint64_t seed = 0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<io::ReportRow> rows;  ///< a row with `pass` set is a gate
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 9;

/// Runs one criterion. Rows named "runtime_seconds" carry wall-clock time.
CriterionResult run_criterion(int id, const Options& opts = {});

/// "[PASS] 1 <title> | gate rows" on one line.
std::string summary_line(const CriterionResult& result);

}  // namespace qtp::acceptance
