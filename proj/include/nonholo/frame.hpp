#pragma once

#include "nonholo/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nonholo {

// A single coordinate chart. Frames are defined per chart; atlases and
// chart transitions are out of scope. Bounds, when present, describe the
// coordinate box the chart is trusted on; they are used by diagnostics and
// sampling only, never enforced.
struct Chart {
    int dim = 0;
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> bounds;  // optional, size 0 or dim

    static Chart make(std::initializer_list<std::string> coordinate_names);
    static Chart numbered(int n, const std::string& prefix = "q");
    Chart with_bounds(std::vector<std::pair<double, double>> b) const;
    void validate() const;
};

// A moving coframe on a chart, given as q -> A(q) where the rows of A are
// the coframe 1-forms in the coordinate coframe dq. The dual frame fields
// are the columns of B = A^{-1}. An analytic derivative tensor may be
// supplied; otherwise central finite differences with step
// fd_step * max(1,|q_j|) are used. derivative(q)(k,i,j) = d a_ki / d q_j.
struct FrameField {
    Chart chart;
    std::function<Mat(const Vec&)> coframe;
    std::function<Tensor3(const Vec&)> derivative;  // optional analytic dA
    double fd_step = 1e-5;

    bool has_analytic_derivative() const { return static_cast<bool>(derivative); }
};

struct FrameEval {
    Mat A;
    Mat B;
    double rcond = 0.0;  // sigma_min / sigma_max of A
};

// A vector field on a chart, components in the coordinate frame. The
// Jacobian is optional; finite differences are used when absent.
struct VectorFieldHandle {
    Chart chart;
    std::function<Vec(const Vec&)> components;
    std::function<Mat(const Vec&)> jacobian;  // optional, column j = d comp / d q_j
    double fd_step = 1e-5;
};

// gamma(i, j, k) holds the coefficient of frame field i in the bracket of
// frame fields j and k; antisymmetric in (j, k).
struct StructureFunctions {
    Tensor3 gamma;
    double raw_antisymmetry_defect = 0.0;  // before enforced antisymmetrization
};

inline constexpr double kSingularFrameRcond = 1e-10;

// Evaluates A(q) and its inverse. Throws SingularFrame when the reciprocal
// condition number falls below kSingularFrameRcond.
FrameEval eval_frame(const FrameField& frame, const Vec& q);

// d a_ki / d q_j, analytic when available, else central differences.
Tensor3 frame_derivative(const FrameField& frame, const Vec& q);

// Jacobian of a vector field (column j = derivative along q_j).
Mat field_jacobian(const VectorFieldHandle& v, const Vec& q);

// [v, w] = (Dw) v - (Dv) w at q.
Vec lie_bracket(const VectorFieldHandle& v, const VectorFieldHandle& w, const Vec& q);

// gamma^i_{jk} with [e_j, e_k] = gamma^i_{jk} e_i, frame fields e = columns
// of B, pairing through the rows of A. Antisymmetrized in (j, k) after the
// raw defect is recorded.
StructureFunctions structure_functions(const FrameField& frame, const Vec& q);

// Frame fields as vector-field handles (column j of B).
VectorFieldHandle frame_field_handle(const FrameField& frame, int index);

}  // namespace nonholo
