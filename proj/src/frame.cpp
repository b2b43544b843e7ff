#include "nonholo/frame.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <set>
#include <sstream>

namespace nonholo {

Chart Chart::make(std::initializer_list<std::string> coordinate_names) {
    Chart c;
    c.names.assign(coordinate_names);
    c.dim = static_cast<int>(c.names.size());
    c.validate();
    return c;
}

Chart Chart::numbered(int n, const std::string& prefix) {
    Chart c;
    c.dim = n;
    for (int i = 1; i <= n; ++i) c.names.push_back(prefix + "_" + std::to_string(i));
    c.validate();
    return c;
}

Chart Chart::with_bounds(std::vector<std::pair<double, double>> b) const {
    Chart c = *this;
    c.bounds = std::move(b);
    c.validate();
    return c;
}

void Chart::validate() const {
    if (dim < 1) throw Error("chart dimension must be >= 1");
    if (static_cast<int>(names.size()) != dim)
        throw Error("chart has " + std::to_string(names.size()) + " names for dim " +
                    std::to_string(dim));
    std::set<std::string> uniq(names.begin(), names.end());
    if (static_cast<int>(uniq.size()) != dim) throw Error("chart coordinate names not unique");
    if (!bounds.empty() && static_cast<int>(bounds.size()) != dim)
        throw Error("chart bounds must cover every coordinate");
    for (const auto& [lo, hi] : bounds)
        if (!(lo < hi)) throw Error("chart bounds must be increasing");
}

namespace {

Mat eval_coframe_checked(const FrameField& frame, const Vec& q) {
    if (q.size() != frame.chart.dim) throw EvaluationFailure("frame: point/chart dim mismatch");
    Mat A = frame.coframe(q);
    if (A.rows() != frame.chart.dim || A.cols() != frame.chart.dim)
        throw EvaluationFailure("frame: coframe matrix has wrong shape");
    if (!A.allFinite()) throw EvaluationFailure("frame: coframe matrix has non-finite entries");
    return A;
}

}  // namespace

FrameEval eval_frame(const FrameField& frame, const Vec& q) {
    FrameEval out;
    out.A = eval_coframe_checked(frame, q);
    Eigen::JacobiSVD<Mat> svd(out.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.rcond = sv(sv.size() - 1) / sv(0);
    if (!(out.rcond > kSingularFrameRcond)) {
        std::ostringstream msg;
        msg << "frame singular at evaluated point (rcond " << out.rcond << ")";
        throw SingularFrame(msg.str());
    }
    out.B = out.A.partialPivLu().inverse();
    return out;
}

Tensor3 frame_derivative(const FrameField& frame, const Vec& q) {
    const int n = frame.chart.dim;
    if (frame.has_analytic_derivative()) {
        Tensor3 t = frame.derivative(q);
        if (t.dim0() != n || t.dim1() != n || t.dim2() != n)
            throw EvaluationFailure("frame: derivative tensor has wrong shape");
        return t;
    }
    Tensor3 t(n, n, n);
    for (int j = 0; j < n; ++j) {
        const double h = fd_step_for(frame.fd_step, q(j));
        Vec qp = q, qm = q;
        qp(j) += h;
        qm(j) -= h;
        Mat Ap = eval_coframe_checked(frame, qp);
        Mat Am = eval_coframe_checked(frame, qm);
        Mat dA = (Ap - Am) / (2.0 * h);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) t(k, i, j) = dA(k, i);
    }
    return t;
}

Mat field_jacobian(const VectorFieldHandle& v, const Vec& q) {
    const int n = v.chart.dim;
    if (v.jacobian) {
        Mat J = v.jacobian(q);
        if (J.rows() != n || J.cols() != n)
            throw EvaluationFailure("vector field: jacobian has wrong shape");
        return J;
    }
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
        const double h = fd_step_for(v.fd_step, q(j));
        Vec qp = q, qm = q;
        qp(j) += h;
        qm(j) -= h;
        Vec fp = v.components(qp);
        Vec fm = v.components(qm);
        if (!fp.allFinite() || !fm.allFinite())
            throw EvaluationFailure("vector field: non-finite values at stencil points");
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

Vec lie_bracket(const VectorFieldHandle& v, const VectorFieldHandle& w, const Vec& q) {
    if (v.chart.dim != w.chart.dim) throw EvaluationFailure("lie_bracket: chart dim mismatch");
    Mat Dv = field_jacobian(v, q);
    Mat Dw = field_jacobian(w, q);
    return Dw * v.components(q) - Dv * w.components(q);
}

VectorFieldHandle frame_field_handle(const FrameField& frame, int index) {
    VectorFieldHandle h;
    h.chart = frame.chart;
    h.fd_step = frame.fd_step;
    h.components = [frame, index](const Vec& q) { return Vec(eval_frame(frame, q).B.col(index)); };
    if (frame.has_analytic_derivative()) {
        // dB = -B dA B, column slice.
        h.jacobian = [frame, index](const Vec& q) {
            FrameEval fe = eval_frame(frame, q);
            Tensor3 dA = frame_derivative(frame, q);
            const int n = frame.chart.dim;
            Mat J(n, n);
            for (int j = 0; j < n; ++j) J.col(j) = -(fe.B * dA.slice2(j) * fe.B).col(index);
            return J;
        };
    }
    return h;
}

StructureFunctions structure_functions(const FrameField& frame, const Vec& q) {
    const int n = frame.chart.dim;
    FrameEval fe = eval_frame(frame, q);
    Tensor3 dA = frame_derivative(frame, q);

    // dB_j = dB/dq_j from dA through B.
    std::vector<Mat> dB(n);
    for (int j = 0; j < n; ++j) dB[j] = -(fe.B * dA.slice2(j) * fe.B);

    StructureFunctions out;
    out.gamma = Tensor3(n, n, n);
    double defect = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            // [e_j, e_k] = (De_k) e_j - (De_j) e_k with De_* assembled from dB.
            Vec bracket = Vec::Zero(n);
            for (int r = 0; r < n; ++r)
                bracket += dB[r].col(k) * fe.B(r, j) - dB[r].col(j) * fe.B(r, k);
            Vec g = fe.A * bracket;
            for (int i = 0; i < n; ++i) out.gamma(i, j, k) = g(i);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                defect = std::max(defect, std::abs(out.gamma(i, j, k) + out.gamma(i, k, j)));
    out.raw_antisymmetry_defect = defect;
    // Enforce antisymmetry in the lower index pair.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double a = 0.5 * (out.gamma(i, j, k) - out.gamma(i, k, j));
                out.gamma(i, j, k) = a;
                out.gamma(i, k, j) = -a;
            }
    return out;
}

}  // namespace nonholo
