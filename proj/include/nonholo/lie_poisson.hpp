#pragma once

#include "nonholo/cotangent.hpp"
#include "nonholo/frame.hpp"

#include <functional>

namespace nonholo {

// Structure constants c(i, j, k) with [X_j, X_k] = c^i_jk X_i.
// validate() enforces antisymmetry in (j, k) and the Jacobi identity.
struct LieAlgebraData {
    int dim = 0;
    Tensor3 c;

    void validate(double tol = 1e-12) const;
};

// Built-in so(3) with c^i_jk the Levi-Civita symbol.
const LieAlgebraData& so3();

struct CoalgebraPoint {
    Vec mu;
};

// Scalar function on the coalgebra with an optional analytic gradient.
struct CoalgebraFunction {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;  // optional
    double fd_step = 1e-5;
};

Vec coalgebra_gradient(const CoalgebraFunction& f, const Vec& mu);

// E_jk = -m_i c^i_jk for the left-invariant convention; sign flipped for
// right-invariant frames. Both are constant in the group variable.
Mat e_matrix_left(const LieAlgebraData& algebra, const Vec& m);
Mat e_matrix_right(const LieAlgebraData& algebra, const Vec& m);

// X2.z1 - X1.z2 + X1^T E X2, organized so that swapping the argument pairs
// negates the result exactly.
double kaks_pairing(const Vec& x1, const Vec& z1, const Vec& x2, const Vec& z2, const Mat& E);

// {f, g}(mu) = -mu_i c^i_jk (grad f)_j (grad g)_k.
double lie_poisson_bracket(const CoalgebraFunction& f, const CoalgebraFunction& g,
                           const CoalgebraPoint& mu, const LieAlgebraData& algebra);

// Free rigid body: mdot = m x omega with omega_i = m_i / inertia_i.
Vec rigid_body_field(const Vec& m, const Vec& inertia);

// ---- SO(3) chart utilities (exponential coordinates) --------------------

Mat hat3(const Vec& w);
Mat rotation_exp(const Vec& theta);

// Jacobians of the exponential chart: body velocity = so3_right_jacobian * thetadot,
// spatial velocity = so3_left_jacobian * thetadot.
Mat so3_right_jacobian(const Vec& theta);
Mat so3_left_jacobian(const Vec& theta);

// Left-invariant coframe on the exponential chart (valid for |theta| < 2 pi,
// away from zero only numerically; the closed forms have removable limits).
FrameField so3_left_invariant_frame();

// Right-invariant frame fields, used as vertical generators of left group
// actions on trivial bundles.
FrameField so3_right_invariant_frame();

}  // namespace nonholo
