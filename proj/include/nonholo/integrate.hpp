#pragma once

#include "nonholo/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace nonholo {

using Field = std::function<Vec(double, const Vec&)>;
using StateMap = std::function<Vec(double, const Vec&)>;
using DiagnosticFn = std::function<double(double, const Vec&)>;

// Time series of states with stored derivatives (for cubic Hermite
// interpolation) and per-step named diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> derivatives;
    std::map<std::string, std::vector<double>> diagnostics;

    void append(double t, const Vec& y, const Vec& ydot);
    int size() const { return static_cast<int>(times.size()); }
    double t0() const { return times.front(); }
    double t1() const { return times.back(); }

    // Cubic Hermite evaluation at time t (t inside the stored range).
    Vec interpolate(double t) const;
};

enum class Method { Rk4, Rk45 };

struct IntegrateOptions {
    Method method = Method::Rk4;
    double h = 1e-3;
    double t_end = 1.0;
    double t_start = 0.0;
    double abs_tol = 1e-10;  // rk45 only
    double rel_tol = 1e-10;  // rk45 only
    std::vector<std::pair<std::string, DiagnosticFn>> diagnostics;
};

Trajectory integrate(const Field& field, const Vec& y0, const IntegrateOptions& opts);

// Max drift of each quantity from its initial value along the trajectory.
std::map<std::string, double> monitor(const Trajectory& traj,
                                      const std::vector<std::pair<std::string, DiagnosticFn>>& quantities);

struct CompareReport {
    double sup_deviation = 0.0;
    Vec per_component;  // sup per mapped component
};

// Sup-norm deviation between two trajectories over their common time range,
// after mapping each state; interpolation is cubic Hermite on the raw
// states, sampled on the union of the stored grids. Symmetric in its
// arguments when the maps are swapped accordingly.
CompareReport compare(const Trajectory& a, const Trajectory& b, const StateMap& map_a = nullptr,
                      const StateMap& map_b = nullptr);

}  // namespace nonholo
