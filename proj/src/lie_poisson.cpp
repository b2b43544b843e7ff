#include "nonholo/lie_poisson.hpp"

#include <cmath>

namespace nonholo {

void LieAlgebraData::validate(double tol) const {
    if (dim < 1) throw Error("lie algebra dimension must be >= 1");
    if (c.dim0() != dim || c.dim1() != dim || c.dim2() != dim)
        throw Error("structure constant array has wrong shape");
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                if (std::abs(c(i, j, k) + c(i, k, j)) > tol)
                    throw Error("structure constants not antisymmetric in the lower indices");
    // Jacobi: sum over cyclic (j,k,l) of c^m_jn c^n_kl = 0.
    for (int m = 0; m < dim; ++m)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l) {
                    double s = 0.0;
                    for (int n = 0; n < dim; ++n)
                        s += c(m, j, n) * c(n, k, l) + c(m, k, n) * c(n, l, j) +
                             c(m, l, n) * c(n, j, k);
                    if (std::abs(s) > tol) throw Error("structure constants violate the Jacobi identity");
                }
}

const LieAlgebraData& so3() {
    static const LieAlgebraData algebra = [] {
        LieAlgebraData a;
        a.dim = 3;
        a.c = Tensor3(3, 3, 3);
        a.c(0, 1, 2) = 1.0;
        a.c(0, 2, 1) = -1.0;
        a.c(1, 2, 0) = 1.0;
        a.c(1, 0, 2) = -1.0;
        a.c(2, 0, 1) = 1.0;
        a.c(2, 1, 0) = -1.0;
        a.validate();
        return a;
    }();
    return algebra;
}

Vec coalgebra_gradient(const CoalgebraFunction& f, const Vec& mu) {
    if (f.gradient) return f.gradient(mu);
    Vec g(mu.size());
    for (int j = 0; j < mu.size(); ++j) {
        const double h = fd_step_for(f.fd_step, mu(j));
        Vec p = mu, m = mu;
        p(j) += h;
        m(j) -= h;
        g(j) = (f.value(p) - f.value(m)) / (2.0 * h);
    }
    return g;
}

Mat e_matrix_left(const LieAlgebraData& algebra, const Vec& m) {
    if (m.size() != algebra.dim) throw Error("e_matrix_left: momentum dimension mismatch");
    return e_matrix_from_gamma(algebra.c, m);
}

Mat e_matrix_right(const LieAlgebraData& algebra, const Vec& m) {
    return -e_matrix_left(algebra, m);
}

double kaks_pairing(const Vec& x1, const Vec& z1, const Vec& x2, const Vec& z2, const Mat& E) {
    const int n = static_cast<int>(x1.size());
    double out = 0.0;
    for (int i = 0; i < n; ++i) out += x2(i) * z1(i) - x1(i) * z2(i);
    // Pairwise form keeps the swap (x1,z1) <-> (x2,z2) an exact negation.
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) out += E(j, k) * (x1(j) * x2(k) - x1(k) * x2(j));
    return out;
}

double lie_poisson_bracket(const CoalgebraFunction& f, const CoalgebraFunction& g,
                           const CoalgebraPoint& mu, const LieAlgebraData& algebra) {
    Vec gf = coalgebra_gradient(f, mu.mu);
    Vec gg = coalgebra_gradient(g, mu.mu);
    if (!gf.allFinite() || !gg.allFinite())
        throw EvaluationFailure("lie_poisson_bracket: non-finite gradient");
    double out = 0.0;
    for (int i = 0; i < algebra.dim; ++i)
        for (int j = 0; j < algebra.dim; ++j)
            for (int k = 0; k < algebra.dim; ++k) out -= mu.mu(i) * algebra.c(i, j, k) * gf(j) * gg(k);
    return out;
}

Vec rigid_body_field(const Vec& m, const Vec& inertia) {
    for (int i = 0; i < 3; ++i)
        if (!(inertia(i) > 0.0)) throw Error("rigid_body_field: inertia entries must be positive");
    Eigen::Vector3d mm = m, omega;
    for (int i = 0; i < 3; ++i) omega(i) = m(i) / inertia(i);
    return mm.cross(omega);
}

Mat hat3(const Vec& w) {
    Mat h = Mat::Zero(3, 3);
    h(0, 1) = -w(2);
    h(0, 2) = w(1);
    h(1, 0) = w(2);
    h(1, 2) = -w(0);
    h(2, 0) = -w(1);
    h(2, 1) = w(0);
    return h;
}

namespace {

// sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3 with series branches near zero.
void exp_coefficients(double t, double& c0, double& c1, double& c2) {
    const double t2 = t * t;
    if (t < 1e-4) {
        c0 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        c1 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    } else {
        c0 = std::sin(t) / t;
        c1 = (1.0 - std::cos(t)) / t2;
        c2 = (t - std::sin(t)) / (t2 * t);
    }
}

}  // namespace

Mat rotation_exp(const Vec& theta) {
    double c0, c1, c2;
    exp_coefficients(theta.norm(), c0, c1, c2);
    Mat h = hat3(theta);
    return Mat::Identity(3, 3) + c0 * h + c1 * h * h;
}

Mat so3_right_jacobian(const Vec& theta) {
    double c0, c1, c2;
    exp_coefficients(theta.norm(), c0, c1, c2);
    Mat h = hat3(theta);
    return Mat::Identity(3, 3) - c1 * h + c2 * h * h;
}

Mat so3_left_jacobian(const Vec& theta) {
    double c0, c1, c2;
    exp_coefficients(theta.norm(), c0, c1, c2);
    Mat h = hat3(theta);
    return Mat::Identity(3, 3) + c1 * h + c2 * h * h;
}

FrameField so3_left_invariant_frame() {
    FrameField f;
    // The chart degenerates at |theta| = 2 pi; the trusted box stays well
    // inside.
    f.chart = Chart::make({"theta_1", "theta_2", "theta_3"})
                  .with_bounds({{-0.9, 0.9}, {-0.9, 0.9}, {-0.9, 0.9}});
    f.coframe = [](const Vec& theta) { return so3_right_jacobian(theta); };
    return f;
}

FrameField so3_right_invariant_frame() {
    FrameField f;
    f.chart = Chart::make({"theta_1", "theta_2", "theta_3"});
    f.coframe = [](const Vec& theta) { return so3_left_jacobian(theta); };
    return f;
}

}  // namespace nonholo
