#include "nonholo/nonholonomic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace nonholo {

namespace {

Vec assemble_full_momentum(const Vec& m_k, const Vec& m_alpha) {
    Vec m(m_k.size() + m_alpha.size());
    m << m_k, m_alpha;
    return m;
}

Mat transversal_hessian(const HamiltonianHandle& h, const ConstraintSplit& split, const Vec& q,
                        const Vec& m_full) {
    Mat H = hamiltonian_hess_mm(h, q, m_full);
    return H.bottomRightCorner(split.r(), split.r());
}

}  // namespace

Vec solve_constraint_surface(const HamiltonianHandle& h, const ConstraintSplit& split,
                             const Vec& q, const Vec& m_k, const SurfaceSolveOptions& opts) {
    const int r = split.r();
    if (r == 0) return Vec::Zero(0);
    if (m_k.size() != split.s) throw Error("solve_constraint_surface: m_k has wrong size");

    Vec m_alpha = opts.seed.size() == r ? opts.seed : Vec::Zero(r);
    const int max_it = h.quadratic_in_m ? 2 : opts.max_iterations;
    for (int it = 0; it < max_it; ++it) {
        Vec m_full = assemble_full_momentum(m_k, m_alpha);
        Vec residual = hamiltonian_grad_m(h, q, m_full).tail(r);
        if (residual.cwiseAbs().maxCoeff() < opts.tol) return m_alpha;
        Mat J = transversal_hessian(h, split, q, m_full);
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible())
            throw SingularHessian("transversal Hessian block singular on the constraint surface");
        m_alpha -= lu.solve(residual);
    }
    Vec residual = hamiltonian_grad_m(h, q, assemble_full_momentum(m_k, m_alpha)).tail(r);
    if (residual.cwiseAbs().maxCoeff() < opts.tol) return m_alpha;
    std::ostringstream msg;
    msg << "constraint surface solve stalled (residual " << residual.cwiseAbs().maxCoeff() << ")";
    throw NoConvergence(msg.str());
}

ConstraintSurfaceMap constraint_surface_map(const HamiltonianHandle& h,
                                            const ConstraintSplit& split,
                                            const SurfaceSolveOptions& opts) {
    ConstraintSurfaceMap map;
    map.tol = opts.tol;
    map.solve = [h, split, opts](const Vec& q, const Vec& m_k) {
        return solve_constraint_surface(h, split, q, m_k, opts);
    };
    return map;
}

DalembertField dalembert_field(const HamiltonianHandle& h, const ConstraintSplit& split,
                               const Vec& q, const Vec& m_k, const SurfaceSolveOptions& opts) {
    const int s = split.s;
    Vec m_alpha = solve_constraint_surface(h, split, q, m_k, opts);
    Vec m_full = assemble_full_momentum(m_k, m_alpha);

    FrameEval fe = eval_frame(split.frame, q);
    Mat E = e_matrix(q, m_full, split.frame);
    FrameGradient dh = frame_gradient(h, q, m_full, split.frame);

    DalembertField out;
    out.m_full = m_full;
    out.v = dh.beta.head(s);
    out.qdot = fe.B.leftCols(s) * out.v;
    out.mdot_k = Vec(s);
    for (int i = 0; i < s; ++i) {
        double coupling = 0.0;
        for (int k = 0; k < s; ++k) coupling += out.v(k) * E(k, i);
        out.mdot_k(i) = -coupling - dh.alpha(i);
    }
    return out;
}

Multipliers multipliers(const HamiltonianHandle& h, const ConstraintSplit& split, const Vec& q,
                        const Vec& m_k, const SurfaceSolveOptions& opts, double sensitivity_step) {
    const int s = split.s;
    const int r = split.r();
    DalembertField flow = dalembert_field(h, split, q, m_k, opts);

    // Chain rule through the surface map, seeding each re-solve with the
    // on-surface value.
    SurfaceSolveOptions seeded = opts;
    seeded.seed = flow.m_full.tail(r);
    Vec mdot_alpha = Vec::Zero(r);
    for (int j = 0; j < q.size(); ++j) {
        const double step = fd_step_for(sensitivity_step, q(j));
        Vec qp = q, qm = q;
        qp(j) += step;
        qm(j) -= step;
        Vec dmdqj = (solve_constraint_surface(h, split, qp, m_k, seeded) -
                     solve_constraint_surface(h, split, qm, m_k, seeded)) /
                    (2.0 * step);
        mdot_alpha += dmdqj * flow.qdot(j);
    }
    for (int k = 0; k < s; ++k) {
        const double step = fd_step_for(sensitivity_step, m_k(k));
        Vec mp = m_k, mm = m_k;
        mp(k) += step;
        mm(k) -= step;
        Vec dmdmk = (solve_constraint_surface(h, split, q, mp, seeded) -
                     solve_constraint_surface(h, split, q, mm, seeded)) /
                    (2.0 * step);
        mdot_alpha += dmdmk * flow.mdot_k(k);
    }

    Mat E = e_matrix(q, flow.m_full, split.frame);
    FrameGradient dh = frame_gradient(h, q, flow.m_full, split.frame);
    Multipliers out;
    out.mdot_alpha = mdot_alpha;
    out.lam = Vec(r);
    for (int a = 0; a < r; ++a) {
        double coupling = 0.0;
        for (int j = 0; j < s; ++j) coupling += flow.v(j) * E(j, s + a);
        out.lam(a) = -mdot_alpha(a) - coupling - dh.alpha(s + a);
    }
    return out;
}

ReducedPoisson reduced_poisson(const HamiltonianHandle& h, const ConstraintSplit& split,
                               const Vec& q, const Vec& m_k, const SurfaceSolveOptions& opts) {
    const int s = split.s;
    const int n = split.n();
    Vec m_alpha = solve_constraint_surface(h, split, q, m_k, opts);
    Vec m_full = assemble_full_momentum(m_k, m_alpha);
    Mat E = e_matrix(q, m_full, split.frame);

    ReducedPoisson out;
    out.ec = E.topLeftCorner(s, s);
    out.matrix = Mat::Zero(n + s, n + s);
    out.matrix.block(0, n, s, s) = Mat::Identity(s, s);
    out.matrix.block(n, 0, s, s) = -Mat::Identity(s, s);
    out.matrix.block(n, n, s, s) = out.ec;
    return out;
}

HamiltonianHandle compress_hamiltonian(const HamiltonianHandle& h, const ConstraintSplit& split,
                                       const SurfaceSolveOptions& opts) {
    const int s = split.s;
    HamiltonianHandle out;
    out.fd_step = h.fd_step;
    out.value = [h, split, opts](const Vec& q, const Vec& m_k) {
        Vec m_alpha = solve_constraint_surface(h, split, q, m_k, opts);
        return h.value(q, assemble_full_momentum(m_k, m_alpha));
    };
    // Envelope identities: the transversal gradient vanishes on the
    // surface, so the full gradients restrict directly.
    out.grad_q = [h, split, opts](const Vec& q, const Vec& m_k) {
        Vec m_alpha = solve_constraint_surface(h, split, q, m_k, opts);
        return hamiltonian_grad_q(h, q, assemble_full_momentum(m_k, m_alpha));
    };
    out.grad_m = [h, split, opts, s](const Vec& q, const Vec& m_k) {
        Vec m_alpha = solve_constraint_surface(h, split, q, m_k, opts);
        return Vec(hamiltonian_grad_m(h, q, assemble_full_momentum(m_k, m_alpha)).head(s));
    };
    return out;
}

AlmostCasimirReport almost_casimir_check(const HamiltonianHandle& h, const ConstraintSplit& split,
                                         const Vec& q, const Vec& m_k,
                                         const std::optional<Vec>& m_alpha_override,
                                         const SurfaceSolveOptions& opts) {
    const int s = split.s;
    const int n = split.n();
    const int r = split.r();
    AlmostCasimirReport report;
    report.r = r;
    if (r == 0) return report;

    ReducedPoisson rp = reduced_poisson(h, split, q, m_k, opts);
    for (int a = s; a < n; ++a) {
        report.max_row_column = std::max(report.max_row_column, rp.matrix.row(a).cwiseAbs().maxCoeff());
        report.max_row_column = std::max(report.max_row_column, rp.matrix.col(a).cwiseAbs().maxCoeff());
    }

    Vec m_alpha =
        m_alpha_override ? *m_alpha_override : solve_constraint_surface(h, split, q, m_k, opts);
    Vec m_full = assemble_full_momentum(m_k, m_alpha);
    FrameEval fe = eval_frame(split.frame, q);
    Vec beta = hamiltonian_grad_m(h, q, m_full);
    Vec qdot = fe.B.leftCols(s) * beta.head(s);
    Vec eps_alpha_qdot = (fe.A * qdot).tail(r);
    report.max_annihilation = eps_alpha_qdot.cwiseAbs().maxCoeff();
    report.max_count_double = (beta.tail(r) - eps_alpha_qdot).cwiseAbs().maxCoeff();
    return report;
}

namespace {

// Components of the differential of a reduced-space function in the basis
// paired with the reduced matrix.
Vec reduced_differential(const HamiltonianHandle& f, const ConstraintSplit& split, const Vec& q,
                         const Vec& m_k) {
    FrameEval fe = eval_frame(split.frame, q);
    Vec comp(split.n() + split.s);
    comp.head(split.n()) = fe.B.transpose() * hamiltonian_grad_q(f, q, m_k);
    comp.tail(split.s) = hamiltonian_grad_m(f, q, m_k);
    return comp;
}

}  // namespace

double jacobiator_diagnostic(const HamiltonianHandle& h, const ConstraintSplit& split, const Vec& q,
                             const Vec& m_k, const SurfaceSolveOptions& opts) {
    const int s = split.s;
    if (s < 2) return 0.0;

    auto bracket = [&](const HamiltonianHandle& f, const HamiltonianHandle& g, const Vec& qq,
                       const Vec& mm) {
        Mat P = reduced_poisson(h, split, qq, mm, opts).matrix;
        Vec df = reduced_differential(f, split, qq, mm);
        Vec dg = reduced_differential(g, split, qq, mm);
        return df.dot(P * dg);
    };
    auto as_handle = [&](std::function<double(const Vec&, const Vec&)> fn) {
        HamiltonianHandle f;
        f.value = std::move(fn);
        return f;
    };

    // Coordinate-style triple: two constrained momenta and one position.
    HamiltonianHandle f = as_handle([](const Vec&, const Vec& m) { return m(0); });
    HamiltonianHandle g = as_handle([](const Vec&, const Vec& m) { return m(1); });
    HamiltonianHandle w = as_handle([](const Vec& qq, const Vec&) { return qq(qq.size() - 1); });

    auto nested = [&](const HamiltonianHandle& a, const HamiltonianHandle& b,
                      const HamiltonianHandle& c) {
        HamiltonianHandle inner = as_handle(
            [&, b, c](const Vec& qq, const Vec& mm) { return bracket(b, c, qq, mm); });
        return bracket(a, inner, q, m_k);
    };
    return std::abs(nested(f, g, w) + nested(g, w, f) + nested(w, f, g));
}

HamiltonianHandle mechanical_hamiltonian(const MechanicalSystem& sys) {
    auto metric = [sys](const Vec& q) {
        FrameEval fe = eval_frame(sys.frame, q);
        Mat M = sys.mass_matrix(q);
        Eigen::LLT<Mat> llt(M);
        if (llt.info() != Eigen::Success)
            throw Error("mechanical_hamiltonian: mass matrix not positive definite");
        Mat Minv = llt.solve(Mat::Identity(M.rows(), M.cols()));
        return Mat(fe.A * Minv * fe.A.transpose());
    };

    HamiltonianHandle h;
    h.quadratic_in_m = true;
    h.value = [sys, metric](const Vec& q, const Vec& m) {
        double e = 0.5 * m.dot(metric(q) * m);
        if (sys.potential) e += sys.potential(q);
        return e;
    };
    h.grad_m = [metric](const Vec& q, const Vec& m) { return Vec(metric(q) * m); };
    h.hess_mm = [metric](const Vec& q, const Vec&) { return metric(q); };

    const bool analytic_mass = sys.constant_mass || static_cast<bool>(sys.mass_derivative);
    if (sys.frame.has_analytic_derivative() && analytic_mass &&
        (!sys.potential || sys.potential_gradient)) {
        h.grad_q = [sys, metric](const Vec& q, const Vec& m) {
            const int n = sys.frame.chart.dim;
            FrameEval fe = eval_frame(sys.frame, q);
            Tensor3 dA = frame_derivative(sys.frame, q);
            Mat M = sys.mass_matrix(q);
            Mat Minv = M.llt().solve(Mat::Identity(n, n));
            Vec g(n);
            for (int j = 0; j < n; ++j) {
                Mat dG = dA.slice2(j) * Minv * fe.A.transpose() +
                         fe.A * Minv * dA.slice2(j).transpose();
                if (!sys.constant_mass) {
                    Mat dM = sys.mass_derivative(q).slice2(j);
                    dG -= fe.A * Minv * dM * Minv * fe.A.transpose();
                }
                g(j) = 0.5 * m.dot(dG * m);
            }
            if (sys.potential_gradient) g += sys.potential_gradient(q);
            return g;
        };
    }
    return h;
}

}  // namespace nonholo
