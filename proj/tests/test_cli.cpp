#include "qtp/cli.hpp"
#include "qtp/error.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

using namespace qtp;
using namespace qtp::cli;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("qtp-cli-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

json oracle_config() {
    return json::parse(R"({
      "command": "oracle-check",
      "spec": {"p": 2, "mu": 0.2, "domain": {"kind": "interval", "resolution": 128},
               "A_plus": 4, "A_minus": 1, "g": {"expr": "x1"}},
      "eps": 0.001
    })");
}

const io::ReportRow* find_row(const RunResult& r, const std::string& name) {
    for (const auto& row : r.rows) {
        if (row.name == name) return &row;
    }
    return nullptr;
}

}  // namespace

TEST(Cli, CommandNames) {
    for (Command c : {Command::Solve, Command::SweepEpsilon, Command::Diagnose, Command::CompareProfile,
                      Command::OracleCheck, Command::Acceptance}) {
        EXPECT_EQ(command_from_string(to_string(c)), c);
    }
    EXPECT_THROW(command_from_string("launch"), ValidationError);
}

TEST(Cli, ParseRejectsBadConfigs) {
    json j = oracle_config();
    j["colour"] = "blue";
    EXPECT_THROW(parse_config(j), ValidationError);
    j = oracle_config();
    j.erase("spec");
    EXPECT_THROW(parse_config(j), ValidationError);
    j = oracle_config();
    j["solve"] = {{"tol", 1e-3}};
    EXPECT_THROW(parse_config(j), ValidationError);
    EXPECT_NO_THROW(parse_config(json{{"command", "acceptance"}, {"seed", 1}}));
}

TEST(Cli, ParseSchedule) {
    json j = oracle_config();
    j["command"] = "sweep-epsilon";
    j["schedule"] = {{"eps0", 0.4}, {"levels", 3}};
    EXPECT_EQ(parse_config(j).schedule, (std::vector<double>{0.4, 0.2, 0.1}));
    j["schedule"] = {0.3, 0.1};
    EXPECT_EQ(parse_config(j).schedule, (std::vector<double>{0.3, 0.1}));
}

TEST(Cli, OracleCheckPasses) {
    RunConfig cfg = parse_config(oracle_config());
    cfg.out = scratch_dir("oracle");
    const auto r = execute(cfg);
    EXPECT_EQ(r.status, 0) << r.reason;
    const auto* row = find_row(r, "interface_error");
    ASSERT_NE(row, nullptr);
    EXPECT_TRUE(row->pass.value_or(false));
    EXPECT_TRUE(std::filesystem::exists(cfg.out / "report.csv"));
    EXPECT_TRUE(std::filesystem::exists(cfg.out / "field_oracle.vtk"));
    std::filesystem::remove_all(cfg.out);
}

TEST(Cli, InvalidSpecExitsTwo) {
    json j = oracle_config();
    j["spec"]["mu"] = 1.5;
    RunConfig cfg = parse_config(j);
    cfg.out = scratch_dir("invalid");
    const auto r = execute(cfg);
    EXPECT_EQ(r.status, 2);
    EXPECT_EQ(r.reason.rfind("spec validation failed", 0), 0u) << r.reason;
    std::filesystem::remove_all(cfg.out);
}

TEST(Cli, AcceptanceNeedsSeed) {
    RunConfig cfg = parse_config(json{{"command", "acceptance"}, {"criteria", {2}}});
    cfg.out = scratch_dir("seed");
    const auto r = execute(cfg);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.reason.find("seed required"), std::string::npos);
    std::filesystem::remove_all(cfg.out);
}

TEST(Cli, SinglePhaseSweepHasNoGaps) {
    json j = json::parse(R"({
      "command": "sweep-epsilon",
      "spec": {"p": 2, "mu": 0.5, "domain": {"kind": "unit-disc", "resolution": 8}, "g": {"expr": "x1"}},
      "schedule": {"eps0": 0.5, "levels": 4}
    })");
    RunConfig cfg = parse_config(j);
    cfg.out = scratch_dir("sweep");
    const auto r = execute(cfg);
    EXPECT_EQ(r.status, 0) << r.reason;
    for (int k = 1; k < 4; ++k) {
        const auto* row = find_row(r, "cauchy_gap_" + std::to_string(k));
        ASSERT_NE(row, nullptr);
        EXPECT_LT(row->value, 1e-8);
    }
    std::filesystem::remove_all(cfg.out);
}
