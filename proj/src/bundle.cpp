#include "nonholo/bundle.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace nonholo {

namespace {

Mat vertical_fiber_matrix(const ConnectionData& conn, const Vec& q) {
    // lambda applied to each generator; should be the identity for a
    // normalized connection.
    Mat lam = conn.connection_form(q);
    Mat gen = conn.vertical_generators(q);
    return lam * gen;
}

VectorFieldHandle lift_handle(const ConnectionData& conn, int i) {
    VectorFieldHandle h;
    h.chart = conn.chart;
    h.fd_step = conn.fd_step;
    h.components = [conn, i](const Vec& q) { return horizontal_lift(conn, q, i); };
    return h;
}

VectorFieldHandle generator_handle(const ConnectionData& conn, int alpha) {
    VectorFieldHandle h;
    h.chart = conn.chart;
    h.fd_step = conn.fd_step;
    h.components = [conn, alpha](const Vec& q) { return Vec(conn.vertical_generators(q).col(alpha)); };
    return h;
}

// Expansion coefficients of a vertical vector in the generator basis.
Vec vertical_coefficients(const ConnectionData& conn, const Vec& q, const Vec& v) {
    Mat gen = conn.vertical_generators(q);
    // Least squares against the generator columns; for a clean vertical
    // vector this is an exact solve of the fiber sub-block.
    return (gen.transpose() * gen).ldlt().solve(gen.transpose() * v);
}

}  // namespace

void validate_connection(const ConnectionData& conn, const Vec& q, double tol) {
    Mat V = vertical_fiber_matrix(conn, q);
    double norm_defect = (V - Mat::Identity(conn.group_dim, conn.group_dim)).cwiseAbs().maxCoeff();
    if (norm_defect > tol) {
        std::ostringstream msg;
        msg << "connection normalization defect " << norm_defect << " exceeds " << tol;
        throw Error(msg.str());
    }
    Mat lam = conn.connection_form(q);
    for (int i = 0; i < conn.base_dim; ++i) {
        double lift_defect = (lam * horizontal_lift(conn, q, i)).cwiseAbs().maxCoeff();
        if (lift_defect > tol) {
            std::ostringstream msg;
            msg << "horizontal lift " << i << " not annihilated (defect " << lift_defect << ")";
            throw Error(msg.str());
        }
    }
}

Vec horizontal_lift(const ConnectionData& conn, const Vec& q, int i) {
    const int n = conn.total_dim();
    Mat lam = conn.connection_form(q);
    Mat gen = conn.vertical_generators(q);
    Mat V = lam * gen;  // r x r
    Eigen::FullPivLU<Mat> lu(V);
    if (!lu.isInvertible()) throw SingularFrame("degenerate vertical generators");
    Vec base_dir = Vec::Zero(n);
    base_dir(i) = 1.0;
    Vec comp = lu.solve(-lam.col(i));
    return base_dir + gen * comp;
}

Vec curvature(const ConnectionData& conn, const Vec& q, int i, int j) {
    VectorFieldHandle ei = lift_handle(conn, i);
    VectorFieldHandle ej = lift_handle(conn, j);
    Vec bracket = lie_bracket(ei, ej, q);
    return -conn.connection_form(q) * bracket;
}

Mat curvature_momentum_block(const ConnectionData& conn, const Vec& q, const Vec& m) {
    const int s = conn.base_dim;
    Mat E = Mat::Zero(s, s);
    Vec m_alpha = m.tail(conn.group_dim);
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) {
            double v = m_alpha.dot(curvature(conn, q, i, j));
            E(i, j) = v;
            E(j, i) = -v;
        }
    return E;
}

Mat base_block_direct(const ConnectionData& conn, const Vec& q, const Vec& m) {
    const int s = conn.base_dim;
    FrameField frame = bundle_frame(conn);
    FrameEval fe = eval_frame(frame, q);
    Mat E = Mat::Zero(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) {
            Vec bracket = lie_bracket(lift_handle(conn, i), lift_handle(conn, j), q);
            // p[e_i,e_j] with p = m in the adapted coframe.
            double v = -m.dot(fe.A * bracket);
            E(i, j) = v;
            E(j, i) = -v;
        }
    return E;
}

Mat vertical_block(const ConnectionData& conn, const Vec& m) {
    const int r = conn.group_dim;
    Vec m_alpha = m.tail(r);
    Mat E = Mat::Zero(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            double v = 0.0;
            for (int c = 0; c < r; ++c) v += m_alpha(c) * conn.algebra.c(c, a, b);
            E(a, b) = v;
        }
    return E;
}

Mat mixed_block(const ConnectionData& conn, const Vec& base_point, const Vec& fiber_coords,
                const Vec& m) {
    const int s = conn.base_dim;
    const int r = conn.group_dim;
    Vec sigma = conn.section(base_point);
    Vec m_alpha = m.tail(r);

    // b^c_{i alpha} at the section.
    Mat block_section = Mat::Zero(s, r);
    std::vector<Mat> b_coeffs(s);
    for (int i = 0; i < s; ++i) {
        Mat bi(r, r);
        for (int a = 0; a < r; ++a) {
            Vec bracket = lie_bracket(lift_handle(conn, i), generator_handle(conn, a), sigma);
            bi.col(a) = vertical_coefficients(conn, sigma, bracket);
        }
        b_coeffs[i] = bi;
    }
    Mat ad = conn.ad_matrix(fiber_coords);
    Mat E(s, r);
    for (int i = 0; i < s; ++i) E.row(i) = -(m_alpha.transpose() * b_coeffs[i] * ad);
    return E;
}

Mat assemble_bundle_e(const ConnectionData& conn, const Vec& q, const Vec& m) {
    const int s = conn.base_dim;
    const int r = conn.group_dim;
    Mat E = Mat::Zero(s + r, s + r);
    E.topLeftCorner(s, s) = curvature_momentum_block(conn, q, m);
    E.bottomRightCorner(r, r) = vertical_block(conn, m);
    Mat mixed = mixed_block(conn, q.head(s), q.tail(r), m);
    E.topRightCorner(s, r) = mixed;
    E.bottomLeftCorner(r, s) = -mixed.transpose();
    return E;
}

FrameField bundle_frame(const ConnectionData& conn) {
    FrameField f;
    f.chart = conn.chart;
    f.fd_step = conn.fd_step;
    f.coframe = [conn](const Vec& q) {
        const int n = conn.total_dim();
        Mat B(n, n);
        for (int i = 0; i < conn.base_dim; ++i) B.col(i) = horizontal_lift(conn, q, i);
        B.rightCols(conn.group_dim) = conn.vertical_generators(q);
        return Mat(B.partialPivLu().inverse());
    };
    return f;
}

ConnectionData heisenberg_bundle() {
    ConnectionData c;
    c.base_dim = 2;
    c.group_dim = 1;
    c.chart = Chart::make({"x", "y", "z"});
    c.connection_form = [](const Vec& q) {
        Mat lam(1, 3);
        lam << -q(1), 0.0, 1.0;
        return lam;
    };
    c.vertical_generators = [](const Vec&) {
        Mat gen = Mat::Zero(3, 1);
        gen(2, 0) = 1.0;
        return gen;
    };
    c.algebra.dim = 1;
    c.algebra.c = Tensor3(1, 1, 1);
    c.ad_matrix = [](const Vec&) { return Mat::Identity(1, 1); };
    c.section = [](const Vec& s) {
        Vec q(3);
        q << s(0), s(1), 0.0;
        return q;
    };
    return c;
}

ConnectionData so3_trivial_bundle(double strength) {
    ConnectionData c;
    c.base_dim = 2;
    c.group_dim = 3;
    c.chart = Chart::make({"s_1", "s_2", "theta_1", "theta_2", "theta_3"});

    // Base part of the connection, an algebra-valued 1-form on the base
    // with nonvanishing curvature.
    auto base_form = [strength](const Vec& s) {
        Mat a = Mat::Zero(3, 2);
        a(0, 1) = strength * s(0);
        a(2, 0) = strength * s(1);
        return a;
    };
    c.connection_form = [base_form](const Vec& q) {
        Vec s = q.head(2);
        Vec theta = q.tail(3);
        Mat lam(3, 5);
        lam.leftCols(2) = rotation_exp(theta) * base_form(s);
        lam.rightCols(3) = so3_left_jacobian(theta);
        return lam;
    };
    c.vertical_generators = [](const Vec& q) {
        Vec theta = q.tail(3);
        Mat gen = Mat::Zero(5, 3);
        gen.bottomRows(3) = so3_left_jacobian(theta).partialPivLu().inverse();
        return gen;
    };
    c.algebra = so3();
    c.ad_matrix = [](const Vec& theta) { return rotation_exp(theta); };
    c.section = [](const Vec& s) {
        Vec q = Vec::Zero(5);
        q.head(2) = s;
        return q;
    };
    return c;
}

}  // namespace nonholo
