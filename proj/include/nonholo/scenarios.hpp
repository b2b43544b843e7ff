#pragma once

#include "nonholo/integrate.hpp"
#include "nonholo/nonholonomic.hpp"
#include "nonholo/oracle.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nonholo {

// ---- Built-in frames -------------------------------------------------------

FrameField identity_frame(int n);
FrameField shear_frame();
FrameField heisenberg_frame();
FrameField vertical_disk_frame(double radius);
FrameField chaplygin_sleigh_frame();

// A registered frame with a sampling box for randomized checks.
struct FrameCase {
    std::string name;
    FrameField frame;
    Vec q_lo, q_hi;
    bool analytic_derivative = false;
};

std::vector<FrameCase> builtin_frames();

Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi);
Vec sample_box(std::mt19937_64& rng, double lo, double hi, int n);

// ---- Scenario registry -----------------------------------------------------

struct ScenarioInfo {
    std::string name;
    std::string origin;  // module of origin: lie_poisson or nonholonomic
    std::string description;
    std::vector<std::pair<std::string, double>> parameters;  // name, default
    int q_dim = 0;   // 0 for coalgebra scenarios
    int m_dim = 0;   // constrained momenta (or coalgebra dim)
    int lambda_dim = 0;
    bool has_oracle = false;
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo& scenario_info(const std::string& name);

// A fully wired scenario: reduced field, diagnostics, optional oracle twin,
// and the structural handles used by the verification suites.
struct ScenarioInstance {
    std::string name;
    int n = 0;  // configuration dimension (0 for coalgebra scenarios)
    int s = 0;  // reduced momentum dimension
    int r = 0;

    Field field;  // on the reduced state [q; m_k] (or [m])
    Vec y0;
    std::vector<std::string> state_columns;

    std::function<double(const Vec&)> energy;
    std::function<double(const Vec&)> constraint_residual;  // re-solved at the state
    std::vector<std::pair<std::string, std::function<double(const Vec&)>>> conserved;
    std::function<Vec(const Vec&)> multipliers_fn;  // r entries, may be empty

    std::optional<ConstraintSplit> split;
    std::optional<HamiltonianHandle> hamiltonian;

    std::optional<OracleSystem> oracle;
    Vec oracle_q0, oracle_qdot0;
    StateMap to_comparable;          // reduced state -> (q, qdot)
    Mat multiplier_mix;              // lambda_frame = mix^T * lambda_oracle

    // Sampling boxes for randomized structure checks.
    Vec q_lo, q_hi, mk_lo, mk_hi;

    std::map<std::string, double> tolerances;
};

ScenarioInstance make_scenario(const std::string& name,
                               const std::map<std::string, double>& parameters,
                               const std::optional<Vec>& initial_q,
                               const std::optional<Vec>& initial_m);

}  // namespace nonholo
