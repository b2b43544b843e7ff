#pragma once

#include "nonholo/integrate.hpp"
#include "nonholo/scenarios.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nonholo {

// Full-precision decimal formatting: 17 significant digits, '.' decimal
// point, round-trips doubles exactly.
std::string format_double(double v);

struct RunConfig {
    std::string scenario;
    std::map<std::string, double> parameters;
    std::optional<Vec> initial_q;
    std::optional<Vec> initial_m;
    std::vector<std::pair<std::optional<Vec>, std::optional<Vec>>> sweep;  // extra initial states
    Method method = Method::Rk4;
    double h = 1e-3;
    double t_end = 10.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    bool compare_oracle = false;
    std::vector<std::string> outputs = {"trajectory_csv", "invariants_csv", "report_json"};
    std::map<std::string, double> tolerance_overrides;
    uint64_t seed = 0;
};

RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_json(const std::string& text);

struct InvariantResult {
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunResult {
    bool pass = true;
    std::map<std::string, InvariantResult> invariants;
    std::optional<double> oracle_sup_deviation;
    std::optional<double> multiplier_sup_deviation;
};

// Executes one scenario run into out_dir (trajectory.csv, invariants.csv,
// report.json as requested). Returns the aggregated invariant results.
RunResult run_scenario(const RunConfig& config, const std::filesystem::path& out_dir);

// Sweep entry point: entry k writes into out_dir/entry_<k> when the config
// lists extra initial states, and a combined report.json at the top level.
// Entries run concurrently; outputs are assembled in index order.
RunResult run_config(const RunConfig& config, const std::filesystem::path& out_dir);

std::string scenario_list_text();
std::string scenario_list_json();

}  // namespace nonholo
