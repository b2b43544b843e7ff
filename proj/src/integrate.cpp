#include "nonholo/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nonholo {

void Trajectory::append(double t, const Vec& y, const Vec& ydot) {
    if (!times.empty()) {
        if (!(t > times.back())) throw Error("trajectory times must be strictly increasing");
        if (y.size() != states.back().size()) throw Error("trajectory state dimension changed");
    }
    if (!y.allFinite() || !ydot.allFinite()) throw Error("trajectory state not finite");
    times.push_back(t);
    states.push_back(y);
    derivatives.push_back(ydot);
}

Vec Trajectory::interpolate(double t) const {
    if (times.empty()) throw IncompatibleTrajectories("empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    int hi = static_cast<int>(it - times.begin());
    int lo = hi - 1;
    double h = times[hi] - times[lo];
    double u = (t - times[lo]) / h;
    double u2 = u * u, u3 = u2 * u;
    double h00 = 2 * u3 - 3 * u2 + 1;
    double h10 = u3 - 2 * u2 + u;
    double h01 = -2 * u3 + 3 * u2;
    double h11 = u3 - u2;
    return h00 * states[lo] + h10 * h * derivatives[lo] + h01 * states[hi] +
           h11 * h * derivatives[hi];
}

namespace {

Vec rk4_step(const Field& f, double t, const Vec& y, double h, const Vec& k1) {
    Vec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    Vec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    Vec k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) coefficients.
struct Dopri {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace

Trajectory integrate(const Field& field, const Vec& y0, const IntegrateOptions& opts) {
    if (!(opts.h > 0.0)) throw Error("integrate: step must be positive");
    if (!(opts.t_end > opts.t_start)) throw Error("integrate: empty time span");
    Trajectory traj;
    auto record = [&](double t, const Vec& y, const Vec& ydot) {
        traj.append(t, y, ydot);
        for (const auto& [name, fn] : opts.diagnostics) traj.diagnostics[name].push_back(fn(t, y));
    };

    double t = opts.t_start;
    Vec y = y0;
    Vec ydot = field(t, y);
    record(t, y, ydot);

    if (opts.method == Method::Rk4) {
        const double span = opts.t_end - opts.t_start;
        const long nsteps = std::lround(span / opts.h);
        const long steps = std::max<long>(1, nsteps);
        const double h = span / static_cast<double>(steps);
        for (long i = 1; i <= steps; ++i) {
            y = rk4_step(field, t, y, h, ydot);
            t = opts.t_start + span * static_cast<double>(i) / static_cast<double>(steps);
            ydot = field(t, y);
            record(t, y, ydot);
        }
        return traj;
    }

    // Adaptive Dormand-Prince with PI-free step control.
    double h = opts.h;
    const double hmin = 1e-14 * std::max(1.0, std::abs(opts.t_end - opts.t_start));
    Vec k1 = ydot;
    while (t < opts.t_end) {
        h = std::min(h, opts.t_end - t);
        if (h < hmin) throw StepFailure("adaptive step underflow");
        Vec k2 = field(t + Dopri::c2 * h, y + h * (Dopri::a21 * k1));
        Vec k3 = field(t + Dopri::c3 * h, y + h * (Dopri::a31 * k1 + Dopri::a32 * k2));
        Vec k4 = field(t + Dopri::c4 * h, y + h * (Dopri::a41 * k1 + Dopri::a42 * k2 + Dopri::a43 * k3));
        Vec k5 = field(t + Dopri::c5 * h,
                       y + h * (Dopri::a51 * k1 + Dopri::a52 * k2 + Dopri::a53 * k3 + Dopri::a54 * k4));
        Vec k6 = field(t + h, y + h * (Dopri::a61 * k1 + Dopri::a62 * k2 + Dopri::a63 * k3 +
                                       Dopri::a64 * k4 + Dopri::a65 * k5));
        Vec ynew = y + h * (Dopri::b1 * k1 + Dopri::b3 * k3 + Dopri::b4 * k4 + Dopri::b5 * k5 +
                            Dopri::b6 * k6);
        Vec k7 = field(t + h, ynew);
        Vec err = h * (Dopri::e1 * k1 + Dopri::e3 * k3 + Dopri::e4 * k4 + Dopri::e5 * k5 +
                       Dopri::e6 * k6 + Dopri::e7 * k7);
        double scale = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double tol = opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            scale = std::max(scale, std::abs(err(i)) / tol);
        }
        if (scale <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            record(t, y, k1);
        }
        double factor = 0.9 * std::pow(std::max(scale, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return traj;
}

std::map<std::string, double> monitor(
    const Trajectory& traj, const std::vector<std::pair<std::string, DiagnosticFn>>& quantities) {
    std::map<std::string, double> out;
    for (const auto& [name, fn] : quantities) {
        double v0 = fn(traj.times.front(), traj.states.front());
        double drift = 0.0;
        for (int i = 0; i < traj.size(); ++i)
            drift = std::max(drift, std::abs(fn(traj.times[i], traj.states[i]) - v0));
        out[name] = drift;
    }
    return out;
}

CompareReport compare(const Trajectory& a, const Trajectory& b, const StateMap& map_a,
                      const StateMap& map_b) {
    if (a.size() == 0 || b.size() == 0) throw IncompatibleTrajectories("empty trajectory");
    const double lo = std::max(a.t0(), b.t0());
    const double hi = std::min(a.t1(), b.t1());
    if (!(hi > lo)) throw IncompatibleTrajectories("trajectories do not overlap in time");

    std::set<double> grid;
    for (double t : a.times)
        if (t >= lo && t <= hi) grid.insert(t);
    for (double t : b.times)
        if (t >= lo && t <= hi) grid.insert(t);

    CompareReport report;
    bool first = true;
    for (double t : grid) {
        Vec ya = a.interpolate(t);
        Vec yb = b.interpolate(t);
        if (map_a) ya = map_a(t, ya);
        if (map_b) yb = map_b(t, yb);
        if (ya.size() != yb.size())
            throw IncompatibleTrajectories("mapped states have different dimensions");
        if (first) {
            report.per_component = Vec::Zero(ya.size());
            first = false;
        }
        for (int i = 0; i < ya.size(); ++i) {
            double d = std::abs(ya(i) - yb(i));
            report.per_component(i) = std::max(report.per_component(i), d);
            report.sup_deviation = std::max(report.sup_deviation, d);
        }
    }
    return report;
}

}  // namespace nonholo
