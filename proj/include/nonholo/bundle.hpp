#pragma once

#include "nonholo/cotangent.hpp"
#include "nonholo/frame.hpp"
#include "nonholo/lie_poisson.hpp"

#include <functional>

namespace nonholo {

// A principal bundle presented on a total-space chart (base coordinates
// first, fiber coordinates last). `connection_form` returns the r x n
// matrix of the algebra-valued connection 1-form in the coordinate
// coframe; `vertical_generators` returns the n x r matrix whose columns
// are the infinitesimal generators of the group action; `ad_matrix` maps
// fiber coordinates to the adjoint representation matrix in the chosen
// algebra basis; `section` lifts a base point to the reference fiber
// point (fiber coordinates of the identity).
struct ConnectionData {
    int base_dim = 0;
    int group_dim = 0;
    Chart chart;  // total space, dim = base_dim + group_dim
    std::function<Mat(const Vec&)> connection_form;
    std::function<Mat(const Vec&)> vertical_generators;
    LieAlgebraData algebra;
    std::function<Mat(const Vec&)> ad_matrix;  // argument: fiber coordinates
    std::function<Vec(const Vec&)> section;    // argument: base coordinates
    double fd_step = 1e-5;

    int total_dim() const { return base_dim + group_dim; }
};

// Checks the connection normalization lambda(e_alpha) = identity and
// horizontal-lift annihilation at a point. Throws on violation.
void validate_connection(const ConnectionData& conn, const Vec& q, double tol = 1e-10);

// The unique vector projecting to the i-th base coordinate field with
// lambda(lift) = 0, computed by solving the r x r vertical system.
Vec horizontal_lift(const ConnectionData& conn, const Vec& q, int i);

// Curvature on lifted commuting base fields: K(e_i, e_j) = -lambda([e_i, e_j]).
Vec curvature(const ConnectionData& conn, const Vec& q, int i, int j);

// Base-base block of E via the momentum-curvature pairing: the momentum
// map components against the vertical generators are the transversal
// quasi-momenta, so E_ij = sum_alpha m_alpha K_alpha(e_i, e_j). `m` is the
// full n-vector in the adapted coframe.
Mat curvature_momentum_block(const ConnectionData& conn, const Vec& q, const Vec& m);

// Direct evaluation of -p[e_i, e_j] for the same block, kept as an
// independent route to cross-check the momentum-curvature pairing.
Mat base_block_direct(const ConnectionData& conn, const Vec& q, const Vec& m);

// Fiber-fiber block: E_ab = +m_c c^c_ab (right-invariant identification of
// the vertical generators).
Mat vertical_block(const ConnectionData& conn, const Vec& m);

// Base-fiber block from the section expansion [e_i, e_alpha](section(s)) =
// b^c_{i alpha}(s) e_c, adjoint-corrected away from the section:
// E_{i alpha}(g . section(s)) = -m_c b^c_{i mu}(s) Ad(g)_{mu alpha}.
Mat mixed_block(const ConnectionData& conn, const Vec& base_point, const Vec& fiber_coords,
                const Vec& m);

// Full antisymmetric n x n E assembled from the three blocks at a chart
// point q (base coords first, fiber coords last).
Mat assemble_bundle_e(const ConnectionData& conn, const Vec& q, const Vec& m);

// The adapted frame (horizontal lifts, then vertical generators) as a
// FrameField on the total-space chart, for the generic pipeline.
FrameField bundle_frame(const ConnectionData& conn);

// ---- Built-in bundles ----------------------------------------------------

// R-bundle over R^2 with connection dz - y dx; the adapted frame is the
// Heisenberg frame.
ConnectionData heisenberg_bundle();

// Trivial SO(3) bundle over R^2 with a curved, equivariant connection;
// `strength` scales the base part of the connection form.
ConnectionData so3_trivial_bundle(double strength = 0.7);

}  // namespace nonholo
