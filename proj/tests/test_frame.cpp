#include "nonholo/frame.hpp"
#include "nonholo/lie_poisson.hpp"
#include "nonholo/scenarios.hpp"

#include "doctest.h"

#include <random>

using namespace nonholo;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("identity frame evaluates to identity matrices") {
    FrameField f = identity_frame(3);
    FrameEval fe = eval_frame(f, vec3(0.4, -1.2, 7.0));
    CHECK((fe.A - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fe.B - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shear frame inverse at q1 = 0.5") {
    FrameEval fe = eval_frame(shear_frame(), vec2(0.5, 2.0));
    Mat expected(2, 2);
    expected << 1, 0, -0.5, 1;
    CHECK((fe.B - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("heisenberg frame inverse at y = 2") {
    FrameEval fe = eval_frame(heisenberg_frame(), vec3(0.0, 2.0, 0.0));
    Mat expected = Mat::Identity(3, 3);
    expected(2, 0) = 2.0;
    CHECK((fe.B - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((fe.A * fe.B - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("singular coframe raises SingularFrame") {
    FrameField f;
    f.chart = Chart::numbered(2);
    f.coframe = [](const Vec& q) {
        Mat A(2, 2);
        A << 1, 1, 1, 1 + q(0);  // singular at q1 = 0
        return A;
    };
    CHECK_THROWS_AS(eval_frame(f, vec2(0.0, 0.0)), SingularFrame);
    CHECK_NOTHROW(eval_frame(f, vec2(0.5, 0.0)));
}

TEST_CASE("frame derivative: constant and linear entries") {
    Tensor3 t = frame_derivative(identity_frame(2), vec2(0.3, -0.4));
    CHECK(t.max_abs() == 0.0);

    Tensor3 ts = frame_derivative(shear_frame(), vec2(0.7, 0.1));
    CHECK(ts(1, 0, 0) == doctest::Approx(1.0));
    double off = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (!(k == 1 && i == 0 && j == 0)) off = std::max(off, std::abs(ts(k, i, j)));
    CHECK(off == 0.0);
}

TEST_CASE("analytic coframe derivatives agree with finite differences") {
    std::mt19937_64 rng(5);
    for (const auto& fc : builtin_frames()) {
        if (!fc.analytic_derivative) continue;
        FrameField fd = fc.frame;
        fd.derivative = nullptr;
        fd.fd_step = 1e-5;
        const int n = fc.frame.chart.dim;
        Vec q = fc.name == "heisenberg" ? vec3(0.3, -0.8, 1.1) : sample_box(rng, fc.q_lo, fc.q_hi);
        Tensor3 ta = frame_derivative(fc.frame, q);
        Tensor3 tf = frame_derivative(fd, q);
        double diff = 0.0;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    diff = std::max(diff, std::abs(ta(k, i, j) - tf(k, i, j)));
        CAPTURE(fc.name);
        CHECK(diff < 1e-8);
    }
}

TEST_CASE("lie bracket of constant fields vanishes") {
    Chart c = Chart::numbered(3);
    VectorFieldHandle v{c, [](const Vec&) { return vec3(1, 2, 3); }, nullptr, 1e-5};
    VectorFieldHandle w{c, [](const Vec&) { return vec3(-1, 0, 4); }, nullptr, 1e-5};
    CHECK(lie_bracket(v, w, vec3(0.2, 0.4, -0.6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lie bracket on the heisenberg fields") {
    Chart c = Chart::make({"x", "y", "z"});
    VectorFieldHandle v{c, [](const Vec& q) { return vec3(1, 0, q(1)); }, nullptr, 1e-5};
    VectorFieldHandle w{c, [](const Vec&) { return vec3(0, 1, 0); }, nullptr, 1e-5};
    Vec b = lie_bracket(v, w, vec3(0.5, 0.7, -0.2));
    CHECK(b(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(b(1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(b(2) == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("lie bracket picks up the product rule term") {
    Chart c = Chart::numbered(3);
    VectorFieldHandle v{c, [](const Vec&) { return vec3(1, 0, 0); }, nullptr, 1e-5};
    VectorFieldHandle w{c, [](const Vec& q) { return vec3(0, q(0), 0); }, nullptr, 1e-5};
    Vec b = lie_bracket(v, w, vec3(0.3, 0.1, 0.9));
    CHECK((b - vec3(0, 1, 0)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lie bracket is bilinear and antisymmetric at random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Chart c = Chart::numbered(3);
    auto f1 = [](const Vec& q) { return vec3(std::sin(q(1)), q(0) * q(2), q(2)); };
    auto j1 = [](const Vec& q) {
        Mat J = Mat::Zero(3, 3);
        J(0, 1) = std::cos(q(1));
        J(1, 0) = q(2);
        J(1, 2) = q(0);
        J(2, 2) = 1.0;
        return J;
    };
    auto f2 = [](const Vec& q) { return vec3(q(1) * q(1), std::cos(q(0)), q(0) + q(2)); };
    auto j2 = [](const Vec& q) {
        Mat J = Mat::Zero(3, 3);
        J(0, 1) = 2 * q(1);
        J(1, 0) = -std::sin(q(0));
        J(2, 0) = 1.0;
        J(2, 2) = 1.0;
        return J;
    };
    VectorFieldHandle v{c, f1, j1, 1e-5};
    VectorFieldHandle w{c, f2, j2, 1e-5};
    VectorFieldHandle sum{c,
                          [&](const Vec& q) { return Vec(2.0 * f1(q) + f2(q)); },
                          [&](const Vec& q) { return Mat(2.0 * j1(q) + j2(q)); },
                          1e-5};
    for (int k = 0; k < 10; ++k) {
        Vec q = vec3(dist(rng), dist(rng), dist(rng));
        Vec vw = lie_bracket(v, w, q);
        Vec wv = lie_bracket(w, v, q);
        CHECK((vw + wv).cwiseAbs().maxCoeff() < 1e-10);
        // [2v + w, w] = 2 [v, w]
        Vec lin = lie_bracket(sum, w, q);
        CHECK((lin - 2.0 * vw).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("structure functions vanish for the coordinate frame") {
    StructureFunctions sf = structure_functions(identity_frame(3), vec3(0.1, 0.2, 0.3));
    CHECK(sf.gamma.max_abs() == 0.0);
    CHECK(sf.raw_antisymmetry_defect == 0.0);
}

TEST_CASE("heisenberg structure functions: single bracket coefficient") {
    StructureFunctions sf = structure_functions(heisenberg_frame(), vec3(0.4, -1.5, 0.8));
    CHECK(sf.gamma(2, 0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sf.gamma(2, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    double other = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                if (!(i == 2 && ((j == 0 && k == 1) || (j == 1 && k == 0))))
                    other = std::max(other, std::abs(sf.gamma(i, j, k)));
    CHECK(other < 1e-12);
    CHECK(sf.raw_antisymmetry_defect < 1e-12);
}

TEST_CASE("so(3) left-invariant frame has Levi-Civita structure functions") {
    FrameField frame = so3_left_invariant_frame();
    const auto& c = so3().c;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    Tensor3 first;
    for (int trial = 0; trial < 3; ++trial) {
        Vec theta = vec3(dist(rng), dist(rng), dist(rng));
        StructureFunctions sf = structure_functions(frame, theta);
        double diff = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    diff = std::max(diff, std::abs(sf.gamma(i, j, k) - c(i, j, k)));
        CHECK(diff < 1e-6);
        CHECK(sf.raw_antisymmetry_defect < 1e-8);
        if (trial == 0) first = sf.gamma;
        // Constancy across chart points.
        double drift = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    drift = std::max(drift, std::abs(sf.gamma(i, j, k) - first(i, j, k)));
        CHECK(drift < 1e-6);
    }
}

TEST_CASE("A.B = I across the registered frames at random points") {
    std::mt19937_64 rng(3);
    for (const auto& fc : builtin_frames()) {
        for (int k = 0; k < 20; ++k) {
            Vec q = sample_box(rng, fc.q_lo, fc.q_hi);
            FrameEval fe = eval_frame(fc.frame, q);
            double tol = 1e-12;
            CHECK((fe.A * fe.B - Mat::Identity(fe.A.rows(), fe.A.cols())).cwiseAbs().maxCoeff() <
                  tol);
        }
        // Raw bracket coefficients must be antisymmetric before the
        // enforced antisymmetrization.
        Vec q = sample_box(rng, fc.q_lo, fc.q_hi);
        CHECK(structure_functions(fc.frame, q).raw_antisymmetry_defect < 1e-8);
    }
}
