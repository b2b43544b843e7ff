#pragma once

#include "nonholo/cotangent.hpp"
#include "nonholo/frame.hpp"

#include <functional>
#include <optional>

namespace nonholo {

// An adapted frame split: the first s frame fields span the constraint
// distribution, the remaining r = n - s are transversal. The constraint
// covectors are the last r rows of the coframe.
struct ConstraintSplit {
    FrameField frame;
    int s = 0;

    int n() const { return frame.chart.dim; }
    int r() const { return n() - s; }
};

struct SurfaceSolveOptions {
    double tol = 1e-12;
    int max_iterations = 50;
    Vec seed;  // defaults to zero
};

// Solves dH/dm_alpha = 0 for the transversal momenta at (q, m_k). Newton
// iteration with the mm-Hessian sub-block; quadratic Hamiltonians land in
// a single exact solve.
Vec solve_constraint_surface(const HamiltonianHandle& h, const ConstraintSplit& split,
                             const Vec& q, const Vec& m_k,
                             const SurfaceSolveOptions& opts = {});

// The solved fiber map as a reusable callable, plus its residual tolerance.
struct ConstraintSurfaceMap {
    std::function<Vec(const Vec&, const Vec&)> solve;
    double tol = 1e-12;
};

ConstraintSurfaceMap constraint_surface_map(const HamiltonianHandle& h,
                                            const ConstraintSplit& split,
                                            const SurfaceSolveOptions& opts = {});

// The constrained vector field at (q, m_k):
//   v_i = dH/dm_i,   mdot_i = -v_k E_ki - alpha_i,   qdot = v_i e_i,
// everything evaluated on the constraint surface.
struct DalembertField {
    Vec qdot;    // n
    Vec mdot_k;  // s
    Vec v;       // s, frame components of the velocity
    Vec m_full;  // n, with the solved transversal momenta
};

DalembertField dalembert_field(const HamiltonianHandle& h, const ConstraintSplit& split,
                               const Vec& q, const Vec& m_k,
                               const SurfaceSolveOptions& opts = {});

// Constraint-force multipliers lambda_alpha = -mdot_alpha - v_j E_{j alpha}
// - alpha_alpha, with mdot_alpha obtained by chain rule through the
// solved surface map (finite-difference sensitivities, step
// sensitivity_step * max(1,|x|)).
struct Multipliers {
    Vec lam;          // r
    Vec mdot_alpha;   // r, the chain-rule transversal momentum rates
};

Multipliers multipliers(const HamiltonianHandle& h, const ConstraintSplit& split, const Vec& q,
                        const Vec& m_k, const SurfaceSolveOptions& opts = {},
                        double sensitivity_step = 1e-6);

// The (n+s) x (n+s) almost-Poisson matrix in the basis ordering
// (constrained coframe rows, transversal coframe rows, fiber differentials
// of the constrained momenta). Middle rows and columns are zero by
// construction; ec is the s x s block -p.[e_j, e_k] on the surface.
struct ReducedPoisson {
    Mat matrix;
    Mat ec;
};

ReducedPoisson reduced_poisson(const HamiltonianHandle& h, const ConstraintSplit& split,
                               const Vec& q, const Vec& m_k,
                               const SurfaceSolveOptions& opts = {});

// H*(q, m_k) = H(q, m_k, m_alpha(q, m_k)) with envelope gradients.
HamiltonianHandle compress_hamiltonian(const HamiltonianHandle& h, const ConstraintSplit& split,
                                       const SurfaceSolveOptions& opts = {});

// Structural checks of the almost-Casimir property at a point:
// (a) transversal rows/columns of the reduced matrix are zero,
// (b) the transversal coframe annihilates the constrained velocity,
// (c) dH/dm_alpha equals the transversal coframe applied to the
//     constrained velocity (both vanish on the surface; m_alpha_override
//     sizes the sensitivity off the surface).
struct AlmostCasimirReport {
    double max_row_column = 0.0;
    double max_annihilation = 0.0;
    double max_count_double = 0.0;
    int r = 0;

    bool pass(double tol) const {
        return max_row_column <= tol && max_annihilation <= tol && max_count_double <= tol;
    }
};

AlmostCasimirReport almost_casimir_check(const HamiltonianHandle& h, const ConstraintSplit& split,
                                         const Vec& q, const Vec& m_k,
                                         const std::optional<Vec>& m_alpha_override = std::nullopt,
                                         const SurfaceSolveOptions& opts = {});

// Magnitude of the Jacobiator of the reduced bracket on coordinate-style
// functions; diagnostic only, generically nonzero for genuinely
// nonholonomic splits.
double jacobiator_diagnostic(const HamiltonianHandle& h, const ConstraintSplit& split, const Vec& q,
                             const Vec& m_k, const SurfaceSolveOptions& opts = {});

// Kinetic-plus-potential Hamiltonian in quasi-momenta for a mechanical
// system: H = 0.5 m^T G(q) m + V(q) with G = A M^{-1} A^T. Gradients are
// analytic when the frame has an analytic derivative and dM is supplied
// (or M is constant).
struct MechanicalSystem {
    FrameField frame;
    std::function<Mat(const Vec&)> mass_matrix;
    std::function<Tensor3(const Vec&)> mass_derivative;  // optional; zero when absent and constant_mass
    bool constant_mass = false;
    std::function<double(const Vec&)> potential;       // optional
    std::function<Vec(const Vec&)> potential_gradient;  // optional
};

HamiltonianHandle mechanical_hamiltonian(const MechanicalSystem& sys);

}  // namespace nonholo
