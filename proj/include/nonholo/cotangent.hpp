#pragma once

#include "nonholo/frame.hpp"

#include <functional>

namespace nonholo {

// A point of the phase space in either parametrization: standard momenta p
// (components in dq) or quasi-momenta m (components in the moving coframe).
enum class Coords { Standard, Quasi };

struct PhaseState {
    Vec q;
    Vec momentum;
    Coords coords = Coords::Standard;
};

// Tangent-side twin of PhaseState: velocities in coordinate components or
// quasi-velocity components u = A qdot. Diagnostics only; the natural
// pairing p . qdot = m . u is basis independent.
struct VelocityState {
    Vec q;
    Vec velocity;
    Coords coords = Coords::Standard;
};

VelocityState velocity_to_quasi(const VelocityState& state, const FrameField& frame);
VelocityState velocity_to_standard(const VelocityState& state, const FrameField& frame);

// Scalar function of (q, m) with optional analytic gradients; central
// finite differences with the frame stencil policy otherwise. hess_mm is
// optional and enables the exact Newton step; quadratic_in_m marks
// Hamiltonians for which a single linear solve lands on the constraint
// surface exactly.
struct HamiltonianHandle {
    std::function<double(const Vec&, const Vec&)> value;
    std::function<Vec(const Vec&, const Vec&)> grad_q;   // optional
    std::function<Vec(const Vec&, const Vec&)> grad_m;   // optional
    std::function<Mat(const Vec&, const Vec&)> hess_mm;  // optional
    bool quadratic_in_m = false;
    double fd_step = 1e-5;

    double operator()(const Vec& q, const Vec& m) const { return value(q, m); }
};

Vec hamiltonian_grad_q(const HamiltonianHandle& h, const Vec& q, const Vec& m);
Vec hamiltonian_grad_m(const HamiltonianHandle& h, const Vec& q, const Vec& m);
Mat hamiltonian_hess_mm(const HamiltonianHandle& h, const Vec& q, const Vec& m);

// m_j = p_i b_ij (and back, p_j = m_i a_ij), at fixed q.
PhaseState to_quasi(const PhaseState& state, const FrameField& frame);
PhaseState to_standard(const PhaseState& state, const FrameField& frame);

// Gradient of the fiber map p(q) = A(q)^T m at fixed m:
// entry (i, j) = m_k d a_ki / d q_j.
Mat momentum_coframe_gradient(const Vec& q, const Vec& m, const FrameField& frame);

// Columns of the 2n x 2n matrix are the (q,m)-adapted phase-space frame
// (first the n corrected horizontal fields, then the n fiber fields)
// expressed in the standard basis (d/dq, d/dp).
Mat phase_frame_basis(const Vec& q, const Vec& m, const FrameField& frame);

// Rows are the adapted coframe (the n coframe forms pulled to phase space,
// then the n fiber differentials dm) expressed in (dq, dp). Algebraically
// the inverse of phase_frame_basis; assembled independently so the duality
// test has two routes.
Mat phase_coframe_basis(const Vec& q, const Vec& m, const FrameField& frame);

// Vertical correction of the adapted horizontal fields relative to the
// fixed-p horizontal lift, in the fiber basis: row i holds the coefficients
// of the correction of field i.
//
// `dictionary` is derived from phase_frame_basis and is the authoritative
// value. `symmetrized` evaluates the closed-form symmetrized expression
// m_k (da_kl/dq_r)(b_ri b_lj + b_rj b_li), kept as a diagnostic;
// `discrepancy` = symmetrized - dictionary.
struct VerticalCorrection {
    Mat dictionary;
    Mat symmetrized;
    Mat discrepancy;
};

VerticalCorrection vertical_correction(const Vec& q, const Vec& m, const FrameField& frame);

// Antisymmetric block E_jk = -m_i gamma^i_jk measuring frame
// non-integrability weighted by momentum.
Mat e_matrix(const Vec& q, const Vec& m, const FrameField& frame);
Mat e_matrix_from_gamma(const Tensor3& gamma, const Vec& m);

// Canonical 2-form in the adapted frame: [[E, -I], [I, 0]].
Mat symplectic_matrix(const Vec& q, const Vec& m, const FrameField& frame);

// Poisson matrix in the adapted coframe: [[0, I], [-I, E]]; inverse of the
// symplectic matrix.
Mat poisson_matrix(const Vec& q, const Vec& m, const FrameField& frame);

// Components of dH in the adapted coframe: dH = alpha_i eps_i + beta_j dm_j,
// with alpha = B^T grad_q H and beta = grad_m H.
struct FrameGradient {
    Vec alpha;
    Vec beta;
};

FrameGradient frame_gradient(const HamiltonianHandle& h, const Vec& q, const Vec& m,
                             const FrameField& frame);

// Assembles the Poisson bivector from a frame decomposition: sum of wedges
// of the corrected horizontal fields with the fiber fields plus the E term.
// `correction` selects the vertical-correction matrix used for the
// horizontal fields (pass dictionary, its antisymmetrization, or the
// symmetrized diagnostic to compare assemblies).
//
// The standard-component form must reproduce the canonical Poisson matrix
// [[0, I], [-I, 0]] whenever the correction is wedge-equivalent to the
// dictionary; this is an absolute check of the dictionary and E together.
Mat poisson_assembly_in_standard(const Vec& q, const Vec& m, const FrameField& frame,
                                 const Mat& correction);

// The same bivector re-expressed in the adapted coframe components.
Mat poisson_assembly_in_coframe(const Vec& q, const Vec& m, const FrameField& frame,
                                const Mat& correction);

}  // namespace nonholo
