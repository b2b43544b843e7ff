#include "nonholo/cotangent.hpp"

namespace nonholo {

namespace {

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double base_step) {
    Vec g(x.size());
    for (int j = 0; j < x.size(); ++j) {
        const double h = fd_step_for(base_step, x(j));
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        g(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

}  // namespace

Vec hamiltonian_grad_q(const HamiltonianHandle& h, const Vec& q, const Vec& m) {
    if (h.grad_q) return h.grad_q(q, m);
    return fd_gradient([&](const Vec& x) { return h.value(x, m); }, q, h.fd_step);
}

Vec hamiltonian_grad_m(const HamiltonianHandle& h, const Vec& q, const Vec& m) {
    if (h.grad_m) return h.grad_m(q, m);
    return fd_gradient([&](const Vec& x) { return h.value(q, x); }, m, h.fd_step);
}

Mat hamiltonian_hess_mm(const HamiltonianHandle& h, const Vec& q, const Vec& m) {
    if (h.hess_mm) return h.hess_mm(q, m);
    const int n = static_cast<int>(m.size());
    Mat H(n, n);
    for (int j = 0; j < n; ++j) {
        const double step = fd_step_for(h.fd_step, m(j));
        Vec mp = m, mm = m;
        mp(j) += step;
        mm(j) -= step;
        H.col(j) = (hamiltonian_grad_m(h, q, mp) - hamiltonian_grad_m(h, q, mm)) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

PhaseState to_quasi(const PhaseState& state, const FrameField& frame) {
    if (state.coords != Coords::Standard) throw Error("to_quasi: state already in quasi coordinates");
    FrameEval fe = eval_frame(frame, state.q);
    PhaseState out;
    out.q = state.q;
    out.momentum = fe.B.transpose() * state.momentum;
    out.coords = Coords::Quasi;
    return out;
}

PhaseState to_standard(const PhaseState& state, const FrameField& frame) {
    if (state.coords != Coords::Quasi) throw Error("to_standard: state already in standard coordinates");
    FrameEval fe = eval_frame(frame, state.q);
    PhaseState out;
    out.q = state.q;
    out.momentum = fe.A.transpose() * state.momentum;
    out.coords = Coords::Standard;
    return out;
}

VelocityState velocity_to_quasi(const VelocityState& state, const FrameField& frame) {
    if (state.coords != Coords::Standard)
        throw Error("velocity_to_quasi: state already in quasi components");
    FrameEval fe = eval_frame(frame, state.q);
    return {state.q, fe.A * state.velocity, Coords::Quasi};
}

VelocityState velocity_to_standard(const VelocityState& state, const FrameField& frame) {
    if (state.coords != Coords::Quasi)
        throw Error("velocity_to_standard: state already in coordinate components");
    FrameEval fe = eval_frame(frame, state.q);
    return {state.q, fe.B * state.velocity, Coords::Standard};
}

Mat momentum_coframe_gradient(const Vec& q, const Vec& m, const FrameField& frame) {
    const int n = frame.chart.dim;
    Tensor3 dA = frame_derivative(frame, q);
    Mat lam = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += m(k) * dA(k, i, j);
            lam(i, j) = s;
        }
    return lam;
}

Mat phase_frame_basis(const Vec& q, const Vec& m, const FrameField& frame) {
    const int n = frame.chart.dim;
    FrameEval fe = eval_frame(frame, q);
    Mat lam = momentum_coframe_gradient(q, m, frame);
    Mat T = Mat::Zero(2 * n, 2 * n);
    T.topLeftCorner(n, n) = fe.B;
    T.bottomLeftCorner(n, n) = lam * fe.B;
    T.bottomRightCorner(n, n) = fe.A.transpose();
    return T;
}

Mat phase_coframe_basis(const Vec& q, const Vec& m, const FrameField& frame) {
    const int n = frame.chart.dim;
    FrameEval fe = eval_frame(frame, q);
    Mat lam = momentum_coframe_gradient(q, m, frame);
    // From dp = Lam dq + A^T dm: dm = B^T dp - B^T Lam dq.
    Mat C = Mat::Zero(2 * n, 2 * n);
    C.topLeftCorner(n, n) = fe.A;
    C.bottomLeftCorner(n, n) = -fe.B.transpose() * lam;
    C.bottomRightCorner(n, n) = fe.B.transpose();
    return C;
}

VerticalCorrection vertical_correction(const Vec& q, const Vec& m, const FrameField& frame) {
    FrameEval fe = eval_frame(frame, q);
    Mat lam = momentum_coframe_gradient(q, m, frame);

    VerticalCorrection out;
    // Fiber part of the corrected horizontal fields is Lam B in d/dp
    // components; converting through dm = B^T dp gives B^T Lam B by
    // columns, i.e. its transpose in the row-per-field layout.
    Mat btlb = fe.B.transpose() * lam * fe.B;
    out.dictionary = btlb.transpose();
    out.symmetrized = btlb + btlb.transpose();
    out.discrepancy = out.symmetrized - out.dictionary;
    return out;
}

Mat e_matrix_from_gamma(const Tensor3& gamma, const Vec& m) {
    const int n = gamma.dim0();
    Mat E = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += m(i) * gamma(i, j, k);
            E(j, k) = -s;
        }
    return E;
}

Mat e_matrix(const Vec& q, const Vec& m, const FrameField& frame) {
    return e_matrix_from_gamma(structure_functions(frame, q).gamma, m);
}

Mat symplectic_matrix(const Vec& q, const Vec& m, const FrameField& frame) {
    const int n = frame.chart.dim;
    Mat E = e_matrix(q, m, frame);
    Mat omega = Mat::Zero(2 * n, 2 * n);
    omega.topLeftCorner(n, n) = E;
    omega.topRightCorner(n, n) = -Mat::Identity(n, n);
    omega.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return omega;
}

Mat poisson_matrix(const Vec& q, const Vec& m, const FrameField& frame) {
    const int n = frame.chart.dim;
    Mat E = e_matrix(q, m, frame);
    Mat P = Mat::Zero(2 * n, 2 * n);
    P.topRightCorner(n, n) = Mat::Identity(n, n);
    P.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    P.bottomRightCorner(n, n) = E;
    return P;
}

FrameGradient frame_gradient(const HamiltonianHandle& h, const Vec& q, const Vec& m,
                             const FrameField& frame) {
    FrameEval fe = eval_frame(frame, q);
    FrameGradient out;
    out.alpha = fe.B.transpose() * hamiltonian_grad_q(h, q, m);
    out.beta = hamiltonian_grad_m(h, q, m);
    return out;
}

Mat poisson_assembly_in_standard(const Vec& q, const Vec& m, const FrameField& frame,
                                 const Mat& correction) {
    const int n = frame.chart.dim;
    FrameEval fe = eval_frame(frame, q);
    Mat E = e_matrix(q, m, frame);

    // Fiber fields in standard components.
    Mat U = Mat::Zero(2 * n, n);
    U.bottomRows(n) = fe.A.transpose();
    // Horizontal fields plus the requested vertical correction.
    Mat T = Mat::Zero(2 * n, n);
    T.topRows(n) = fe.B;
    T.bottomRows(n) = fe.A.transpose() * correction.transpose();

    Mat W = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        W += T.col(i) * U.col(i).transpose() - U.col(i) * T.col(i).transpose();
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            W += 0.5 * E(j, k) * (U.col(j) * U.col(k).transpose() - U.col(k) * U.col(j).transpose());
    return W;
}

Mat poisson_assembly_in_coframe(const Vec& q, const Vec& m, const FrameField& frame,
                                const Mat& correction) {
    Mat W = poisson_assembly_in_standard(q, m, frame, correction);
    Mat C = phase_coframe_basis(q, m, frame);
    return C * W * C.transpose();
}

}  // namespace nonholo
