#pragma once

#include "nonholo/integrate.hpp"
#include "nonholo/types.hpp"

#include <functional>

namespace nonholo {

// Second-order mechanical system in plain coordinates with linear velocity
// constraints: M(q) qddot = F(q, qdot) + A_c(q)^T lambda, A_c(q) qdot = 0.
// This path deliberately works in (q, qdot) with the raw constraint matrix
// and never touches the moving-frame code.
struct OracleSystem {
    int n = 0;
    int r = 0;
    std::function<Mat(const Vec&)> mass_matrix;
    std::function<double(const Vec&)> potential;        // optional
    std::function<Vec(const Vec&)> potential_gradient;  // optional (fd otherwise)
    std::function<Mat(const Vec&)> constraint_matrix;   // r x n, rows span the annihilator
    double fd_step = 1e-6;
};

// Multipliers solved per evaluation from the differentiated constraint:
// (A_c M^-1 A_c^T) lambda = -A_c M^-1 F - Adot_c qdot.
struct OracleEval {
    Vec qddot;
    Vec lambda;
};

OracleEval oracle_acceleration(const OracleSystem& sys, const Vec& q, const Vec& qdot);

// Integrates the constrained flow from consistent initial data; the state
// is (q; qdot) and the per-step multipliers are recorded as diagnostics
// lambda_1..lambda_r.
Trajectory oracle_trajectory(const OracleSystem& sys, const Vec& q0, const Vec& qdot0,
                             const IntegrateOptions& opts);

// Lagrangian energy 0.5 qdot^T M qdot + V.
double oracle_energy(const OracleSystem& sys, const Vec& q, const Vec& qdot);

// Least-squares row mix R with constraint_rows ~= R * coframe_rows, fitted
// over sample points. Oracle multipliers map to coframe components as
// R^T lambda. Throws when the residual exceeds `tol`.
Mat multiplier_row_mix(const std::function<Mat(const Vec&)>& constraint_rows,
                       const std::function<Mat(const Vec&)>& coframe_rows,
                       const std::vector<Vec>& samples, double tol = 1e-12);

}  // namespace nonholo
