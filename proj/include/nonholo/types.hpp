#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nonholo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error hierarchy shared across the library. Call sites throw the most
// specific type; the CLI maps them to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularFrame : Error {
    using Error::Error;
};
struct EvaluationFailure : Error {
    using Error::Error;
};
struct SingularHessian : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct SingularConstraintMetric : Error {
    using Error::Error;
};
struct InconsistentInitialData : Error {
    using Error::Error;
};
struct IncompatibleTrajectories : Error {
    using Error::Error;
};
struct StepFailure : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Dense rank-3 array of doubles. Used for coframe derivatives, where
// entry (k, i, j) holds the derivative of matrix entry (k, i) along
// coordinate j.
class Tensor3 {
  public:
    Tensor3() = default;
    Tensor3(int d0, int d1, int d2)
        : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<size_t>(d0) * d1 * d2, 0.0) {}

    double& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }

    int dim0() const { return d0_; }
    int dim1() const { return d1_; }
    int dim2() const { return d2_; }

    // Slice along the last index: M(i,j) = t(i,j,k) for fixed k.
    Mat slice2(int k) const {
        Mat m(d0_, d1_);
        for (int i = 0; i < d0_; ++i)
            for (int j = 0; j < d1_; ++j) m(i, j) = (*this)(i, j, k);
        return m;
    }

    double max_abs() const {
        double v = 0.0;
        for (double x : data_) v = std::max(v, std::abs(x));
        return v;
    }

  private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * d1_ + j) * d2_ + k;
    }
    int d0_ = 0, d1_ = 0, d2_ = 0;
    std::vector<double> data_;
};

// Per-direction central-difference step, h * max(1, |x|).
inline double fd_step_for(double base, double x) {
    return base * std::max(1.0, std::abs(x));
}

}  // namespace nonholo
