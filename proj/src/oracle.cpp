#include "nonholo/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace nonholo {

namespace {

Vec potential_grad(const OracleSystem& sys, const Vec& q) {
    if (!sys.potential) return Vec::Zero(sys.n);
    if (sys.potential_gradient) return sys.potential_gradient(q);
    Vec g(sys.n);
    for (int j = 0; j < sys.n; ++j) {
        const double h = fd_step_for(1e-5, q(j));
        Vec qp = q, qm = q;
        qp(j) += h;
        qm(j) -= h;
        g(j) = (sys.potential(qp) - sys.potential(qm)) / (2.0 * h);
    }
    return g;
}

Mat mass_derivative_slice(const OracleSystem& sys, const Vec& q, int j) {
    const double h = fd_step_for(sys.fd_step, q(j));
    Vec qp = q, qm = q;
    qp(j) += h;
    qm(j) -= h;
    return (sys.mass_matrix(qp) - sys.mass_matrix(qm)) / (2.0 * h);
}

// Euler-Lagrange force with the mass matrix terms spelled out:
// F_j = 0.5 qdot^T (dM/dq_j) qdot - (Mdot qdot)_j - dV/dq_j.
Vec el_force(const OracleSystem& sys, const Vec& q, const Vec& qdot) {
    Vec F = -potential_grad(sys, q);
    Mat Mdot = Mat::Zero(sys.n, sys.n);
    for (int j = 0; j < sys.n; ++j) {
        Mat dMj = mass_derivative_slice(sys, q, j);
        F(j) += 0.5 * qdot.dot(dMj * qdot);
        Mdot += dMj * qdot(j);
    }
    F -= Mdot * qdot;
    return F;
}

}  // namespace

OracleEval oracle_acceleration(const OracleSystem& sys, const Vec& q, const Vec& qdot) {
    Mat M = sys.mass_matrix(q);
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
        throw Error("oracle: mass matrix not symmetric");
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) throw Error("oracle: mass matrix not positive definite");

    Vec F = el_force(sys, q, qdot);
    OracleEval out;
    if (sys.r == 0) {
        out.qddot = llt.solve(F);
        out.lambda = Vec::Zero(0);
        return out;
    }

    Mat Ac = sys.constraint_matrix(q);
    Mat Adot = Mat::Zero(sys.r, sys.n);
    for (int j = 0; j < sys.n; ++j) {
        const double h = fd_step_for(sys.fd_step, q(j));
        Vec qp = q, qm = q;
        qp(j) += h;
        qm(j) -= h;
        Adot += (sys.constraint_matrix(qp) - sys.constraint_matrix(qm)) / (2.0 * h) * qdot(j);
    }

    Mat MinvAcT = llt.solve(Mat(Ac.transpose()));
    Mat W = Ac * MinvAcT;  // r x r
    Eigen::FullPivLU<Mat> lu(W);
    if (!lu.isInvertible()) throw SingularConstraintMetric("constraint metric A M^-1 A^T singular");
    out.lambda = lu.solve(-(Ac * llt.solve(F)) - Adot * qdot);
    out.qddot = llt.solve(F + Ac.transpose() * out.lambda);
    return out;
}

Trajectory oracle_trajectory(const OracleSystem& sys, const Vec& q0, const Vec& qdot0,
                             const IntegrateOptions& opts) {
    if (sys.r > 0) {
        Mat Ac = sys.constraint_matrix(q0);
        Eigen::JacobiSVD<Mat> svd(Ac);
        if (svd.rank() < sys.r) throw SingularConstraintMetric("constraint matrix rank deficient");
        if ((Ac * qdot0).cwiseAbs().maxCoeff() > 1e-10)
            throw InconsistentInitialData("initial velocity violates the constraints");
    }

    Field field = [&sys](double, const Vec& y) {
        Vec q = y.head(sys.n);
        Vec qdot = y.tail(sys.n);
        Vec dy(2 * sys.n);
        dy.head(sys.n) = qdot;
        dy.tail(sys.n) = oracle_acceleration(sys, q, qdot).qddot;
        return dy;
    };

    IntegrateOptions run = opts;
    for (int a = 0; a < sys.r; ++a) {
        run.diagnostics.emplace_back("lambda_" + std::to_string(a + 1),
                                     [&sys, a](double, const Vec& y) {
                                         return oracle_acceleration(sys, y.head(sys.n), y.tail(sys.n))
                                             .lambda(a);
                                     });
    }
    Vec y0(2 * sys.n);
    y0 << q0, qdot0;
    return integrate(field, y0, run);
}

double oracle_energy(const OracleSystem& sys, const Vec& q, const Vec& qdot) {
    double e = 0.5 * qdot.dot(sys.mass_matrix(q) * qdot);
    if (sys.potential) e += sys.potential(q);
    return e;
}

Mat multiplier_row_mix(const std::function<Mat(const Vec&)>& constraint_rows,
                       const std::function<Mat(const Vec&)>& coframe_rows,
                       const std::vector<Vec>& samples, double tol) {
    if (samples.empty()) throw Error("multiplier_row_mix: no sample points");
    Mat lhs, rhs;
    // Normal equations of min over R of sum_s |R * coframe(q_s) - constraint(q_s)|^2.
    for (const Vec& q : samples) {
        Mat E = coframe_rows(q);
        Mat C = constraint_rows(q);
        if (lhs.size() == 0) {
            lhs = Mat::Zero(E.rows(), E.rows());
            rhs = Mat::Zero(C.rows(), E.rows());
        }
        lhs += E * E.transpose();
        rhs += C * E.transpose();
    }
    Mat R = lhs.ldlt().solve(rhs.transpose()).transpose();
    double residual = 0.0;
    for (const Vec& q : samples)
        residual = std::max(residual,
                            (R * coframe_rows(q) - constraint_rows(q)).cwiseAbs().maxCoeff());
    if (residual > tol)
        throw Error("multiplier_row_mix: constraint rows are not a fixed mix of the coframe rows");
    return R;
}

}  // namespace nonholo
