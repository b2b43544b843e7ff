#include "nonholo/lie_poisson.hpp"
#include "nonholo/scenarios.hpp"

#include "doctest.h"

#include <random>

using namespace nonholo;

namespace {

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

CoalgebraFunction coordinate(int i, const LieAlgebraData& algebra) {
    CoalgebraFunction f;
    f.value = [i](const Vec& mu) { return mu(i); };
    f.gradient = [i, dim = algebra.dim](const Vec&) {
        Vec g = Vec::Zero(dim);
        g(i) = 1.0;
        return g;
    };
    return f;
}

LieAlgebraData abelian(int dim) {
    LieAlgebraData a;
    a.dim = dim;
    a.c = Tensor3(dim, dim, dim);
    return a;
}

}  // namespace

TEST_CASE("so(3) table passes validation, broken tables do not") {
    CHECK_NOTHROW(so3().validate());
    LieAlgebraData bad = so3();
    bad.c(0, 1, 2) = 0.5;  // breaks antisymmetry against c(0,2,1)
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("left and right invariant E matrices") {
    CHECK(e_matrix_left(abelian(3), vec3(1, 2, 3)).cwiseAbs().maxCoeff() == 0.0);

    Vec m = vec3(0.4, -1.1, 2.2);
    Mat E = e_matrix_left(so3(), m);
    CHECK((E - hat3(m)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((e_matrix_right(so3(), m) + hat3(m)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((e_matrix_right(so3(), m) + e_matrix_left(so3(), m)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant-table E agrees with the chart-frame pipeline") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    FrameField frame = so3_left_invariant_frame();
    Vec m = vec3(0.8, -0.3, 1.4);
    Mat E_table = e_matrix_left(so3(), m);
    for (int k = 0; k < 3; ++k) {
        Vec theta = vec3(dist(rng), dist(rng), dist(rng));
        Mat E_chart = e_matrix(theta, m, frame);
        CHECK((E_chart - E_table).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("kaks pairing values and exact antisymmetry") {
    Mat E = hat3(vec3(0, 0, 1));
    Vec zero = Vec::Zero(3);
    CHECK(kaks_pairing(zero, vec3(1, 2, 3), zero, vec3(-1, 0, 2), E) == 0.0);

    Vec ex = vec3(1, 0, 0), ey = vec3(0, 1, 0);
    CHECK(kaks_pairing(ex, zero, ey, zero, E) == doctest::Approx(-1.0));

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        Vec x1 = vec3(dist(rng), dist(rng), dist(rng));
        Vec z1 = vec3(dist(rng), dist(rng), dist(rng));
        Vec x2 = vec3(dist(rng), dist(rng), dist(rng));
        Vec z2 = vec3(dist(rng), dist(rng), dist(rng));
        Mat Em = hat3(vec3(dist(rng), dist(rng), dist(rng)));
        double ab = kaks_pairing(x1, z1, x2, z2, Em);
        double ba = kaks_pairing(x2, z2, x1, z1, Em);
        CHECK(ab == -ba);  // exact
        // Power-of-two homogeneity is exact as well.
        CHECK(kaks_pairing(Vec(2.0 * x1), Vec(2.0 * z1), x2, z2, Em) == 2.0 * ab);
    }
}

TEST_CASE("lie-poisson bracket on so(3)* coordinates") {
    CoalgebraFunction constant{[](const Vec&) { return 4.2; },
                               [](const Vec& mu) { return Vec(Vec::Zero(mu.size())); }, 1e-5};
    CoalgebraPoint mu{vec3(0.7, -0.4, 1.9)};
    CHECK(lie_poisson_bracket(constant, constant, mu, so3()) == 0.0);

    CoalgebraFunction m1 = coordinate(0, so3());
    CoalgebraFunction m2 = coordinate(1, so3());
    CHECK(lie_poisson_bracket(m1, m2, mu, so3()) == doctest::Approx(-mu.mu(2)).epsilon(1e-14));

    CoalgebraFunction casimir;
    casimir.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    casimir.gradient = [](const Vec& x) { return x; };
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(lie_poisson_bracket(casimir, coordinate(i, so3()), mu, so3())) < 1e-12);
    }
}

TEST_CASE("lie-poisson bracket satisfies the Jacobi identity on coordinates") {
    CoalgebraPoint mu{vec3(1.3, -2.1, 0.4)};
    auto bracket_fn = [&](int i, int j) {
        CoalgebraFunction f;
        f.value = [i, j](const Vec& x) {
            CoalgebraPoint p{x};
            return lie_poisson_bracket(coordinate(i, so3()), coordinate(j, so3()), p, so3());
        };
        // {m_i, m_j} is linear with constant gradient -c^._ij.
        f.gradient = [i, j](const Vec& x) {
            Vec g(x.size());
            for (int k = 0; k < x.size(); ++k) g(k) = -so3().c(k, i, j);
            return g;
        };
        return f;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                double cyc =
                    lie_poisson_bracket(coordinate(i, so3()), bracket_fn(j, k), mu, so3()) +
                    lie_poisson_bracket(coordinate(j, so3()), bracket_fn(k, i), mu, so3()) +
                    lie_poisson_bracket(coordinate(k, so3()), bracket_fn(i, j), mu, so3());
                CHECK(std::abs(cyc) < 1e-12);
            }
}

TEST_CASE("rigid body field: principal axes, conservation, worked value") {
    Vec inertia = vec3(1, 2, 3);
    for (int axis = 0; axis < 3; ++axis) {
        Vec m = Vec::Zero(3);
        m(axis) = 1.7;
        CHECK(rigid_body_field(m, inertia).cwiseAbs().maxCoeff() == 0.0);
    }

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        Vec m = vec3(dist(rng), dist(rng), dist(rng));
        CHECK(std::abs(rigid_body_field(m, inertia).dot(m)) < 1e-14);
    }

    Vec mdot = rigid_body_field(vec3(1, 1, 1), inertia);
    CHECK(mdot(0) == doctest::Approx(-1.0 / 6).epsilon(1e-15));
    CHECK(mdot(1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(mdot(2) == doctest::Approx(-1.0 / 2).epsilon(1e-15));

    // Field must equal the bracket evaluation {m_i, H} componentwise.
    CoalgebraFunction H;
    H.value = [inertia](const Vec& x) {
        double e = 0;
        for (int i = 0; i < 3; ++i) e += 0.5 * x(i) * x(i) / inertia(i);
        return e;
    };
    H.gradient = [inertia](const Vec& x) {
        Vec g(3);
        for (int i = 0; i < 3; ++i) g(i) = x(i) / inertia(i);
        return g;
    };
    Vec m = vec3(0.6, -1.2, 0.9);
    Vec f = rigid_body_field(m, inertia);
    for (int i = 0; i < 3; ++i) {
        CHECK(lie_poisson_bracket(coordinate(i, so3()), H, CoalgebraPoint{m}, so3()) ==
              doctest::Approx(f(i)).epsilon(1e-14));
    }
}

TEST_CASE("so(3) chart jacobians are consistent with the exponential map") {
    // Finite-difference check: d/dt Exp(theta + t delta) at t=0 has body
    // components J_r(theta) delta and spatial components J_l(theta) delta.
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> dist(-1.2, 1.2);
    for (int k = 0; k < 5; ++k) {
        Vec theta = vec3(dist(rng), dist(rng), dist(rng));
        Vec delta = vec3(dist(rng), dist(rng), dist(rng));
        const double h = 1e-6;
        Mat Rp = rotation_exp(theta + h * delta);
        Mat Rm = rotation_exp(theta - h * delta);
        Mat dR = (Rp - Rm) / (2 * h);
        Mat R = rotation_exp(theta);
        Mat body = R.transpose() * dR;     // hat of J_r delta
        Mat spatial = dR * R.transpose();  // hat of J_l delta
        Vec body_vec = vec3(body(2, 1), body(0, 2), body(1, 0));
        Vec spatial_vec = vec3(spatial(2, 1), spatial(0, 2), spatial(1, 0));
        CHECK((body_vec - so3_right_jacobian(theta) * delta).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((spatial_vec - so3_left_jacobian(theta) * delta).cwiseAbs().maxCoeff() < 1e-8);
    }
}
