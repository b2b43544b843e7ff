#include "nonholo/scenarios.hpp"

#include "nonholo/lie_poisson.hpp"

#include <cmath>
#include <sstream>

namespace nonholo {

FrameField identity_frame(int n) {
    FrameField f;
    f.chart = Chart::numbered(n);
    f.coframe = [n](const Vec&) { return Mat::Identity(n, n); };
    f.derivative = [n](const Vec&) { return Tensor3(n, n, n); };
    return f;
}

FrameField shear_frame() {
    FrameField f;
    f.chart = Chart::numbered(2).with_bounds({{-1, 1}, {-1, 1}});
    f.coframe = [](const Vec& q) {
        Mat A = Mat::Identity(2, 2);
        A(1, 0) = q(0);
        return A;
    };
    f.derivative = [](const Vec&) {
        Tensor3 t(2, 2, 2);
        t(1, 0, 0) = 1.0;
        return t;
    };
    return f;
}

FrameField heisenberg_frame() {
    FrameField f;
    f.chart = Chart::make({"x", "y", "z"}).with_bounds({{-1, 1}, {-1, 1}, {-1, 1}});
    f.coframe = [](const Vec& q) {
        Mat A = Mat::Identity(3, 3);
        A(2, 0) = -q(1);
        return A;
    };
    f.derivative = [](const Vec&) {
        Tensor3 t(3, 3, 3);
        t(2, 0, 1) = -1.0;
        return t;
    };
    return f;
}

FrameField vertical_disk_frame(double radius) {
    FrameField f;
    f.chart = Chart::make({"theta", "phi", "x", "y"}).with_bounds({{-2, 2}, {-1, 1}, {-1, 1}, {-1, 1}});
    f.coframe = [radius](const Vec& q) {
        Mat A = Mat::Identity(4, 4);
        A(2, 1) = -radius * std::cos(q(0));
        A(3, 1) = -radius * std::sin(q(0));
        return A;
    };
    f.derivative = [radius](const Vec& q) {
        Tensor3 t(4, 4, 4);
        t(2, 1, 0) = radius * std::sin(q(0));
        t(3, 1, 0) = -radius * std::cos(q(0));
        return t;
    };
    return f;
}

FrameField chaplygin_sleigh_frame() {
    FrameField f;
    f.chart = Chart::make({"x", "y", "theta"}).with_bounds({{-1, 1}, {-1, 1}, {-2, 2}});
    f.coframe = [](const Vec& q) {
        const double c = std::cos(q(2)), s = std::sin(q(2));
        Mat A(3, 3);
        A << c, s, 0, 0, 0, 1, -s, c, 0;
        return A;
    };
    f.derivative = [](const Vec& q) {
        const double c = std::cos(q(2)), s = std::sin(q(2));
        Tensor3 t(3, 3, 3);
        t(0, 0, 2) = -s;
        t(0, 1, 2) = c;
        t(2, 0, 2) = -c;
        t(2, 1, 2) = -s;
        return t;
    };
    return f;
}

std::vector<FrameCase> builtin_frames() {
    auto from_bounds = [](const std::string& name, FrameField frame, bool analytic) {
        FrameCase fc;
        fc.name = name;
        fc.q_lo = Vec(frame.chart.dim);
        fc.q_hi = Vec(frame.chart.dim);
        for (int i = 0; i < frame.chart.dim; ++i) {
            fc.q_lo(i) = frame.chart.bounds[i].first;
            fc.q_hi(i) = frame.chart.bounds[i].second;
        }
        fc.frame = std::move(frame);
        fc.analytic_derivative = analytic;
        return fc;
    };
    return {
        from_bounds("shear", shear_frame(), true),
        from_bounds("heisenberg", heisenberg_frame(), true),
        from_bounds("so3_left_invariant", so3_left_invariant_frame(), false),
        from_bounds("vertical_disk", vertical_disk_frame(1.0), true),
        from_bounds("chaplygin_sleigh", chaplygin_sleigh_frame(), true),
    };
}

Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Vec q(lo.size());
    for (int i = 0; i < lo.size(); ++i) q(i) = lo(i) + (hi(i) - lo(i)) * dist(rng);
    return q;
}

Vec sample_box(std::mt19937_64& rng, double lo, double hi, int n) {
    return sample_box(rng, Vec::Constant(n, lo), Vec::Constant(n, hi));
}

// ---------------------------------------------------------------------------

const std::vector<ScenarioInfo>& scenario_registry() {
    static const std::vector<ScenarioInfo> registry = {
        {"rigid_body", "lie_poisson", "free rigid body on so(3)*, coalgebra flow",
         {{"inertia_1", 1.0}, {"inertia_2", 2.0}, {"inertia_3", 3.0}},
         0, 3, 0, false},
        {"heisenberg_particle", "nonholonomic",
         "unit-mass particle with the nonintegrable planar constraint zdot = y xdot",
         {{"mass", 1.0}},
         3, 2, 1, true},
        {"vertical_disk", "nonholonomic", "vertical disk rolling without slipping",
         {{"mass", 1.0}, {"radius", 1.0}, {"inertia_spin", 0.5}, {"inertia_turn", 0.25}},
         4, 2, 2, true},
        {"chaplygin_sleigh", "nonholonomic", "sleigh with a knife-edge contact and offset mass",
         {{"mass", 1.0}, {"inertia", 0.4}, {"offset", 0.3}},
         3, 2, 1, true},
        {"shear_demo", "nonholonomic",
         "unconstrained oscillator in a sheared moving frame (r = 0 limit)",
         {{"mass", 1.0}, {"stiffness", 1.0}},
         2, 2, 0, true},
    };
    return registry;
}

const ScenarioInfo& scenario_info(const std::string& name) {
    for (const auto& info : scenario_registry())
        if (info.name == name) return info;
    std::ostringstream msg;
    msg << "unknown scenario '" << name << "'; registered:";
    for (const auto& info : scenario_registry()) msg << " " << info.name;
    throw ConfigError(msg.str());
}

namespace {

std::map<std::string, double> resolve_parameters(const ScenarioInfo& info,
                                                 const std::map<std::string, double>& given) {
    std::map<std::string, double> params;
    for (const auto& [name, value] : info.parameters) params[name] = value;
    for (const auto& [name, value] : given) {
        if (!params.count(name))
            throw ConfigError("scenario " + info.name + ": unknown parameter '" + name + "'");
        params[name] = value;
    }
    return params;
}

std::vector<std::string> momentum_columns(int s) {
    std::vector<std::string> cols;
    for (int i = 1; i <= s; ++i) cols.push_back("m_" + std::to_string(i));
    return cols;
}

ScenarioInstance make_rigid_body(const std::map<std::string, double>& params, const Vec& m0) {
    ScenarioInstance inst;
    inst.name = "rigid_body";
    inst.n = 0;
    inst.s = 3;
    inst.r = 0;
    Vec inertia(3);
    inertia << params.at("inertia_1"), params.at("inertia_2"), params.at("inertia_3");
    inst.field = [inertia](double, const Vec& m) { return rigid_body_field(m, inertia); };
    inst.y0 = m0;
    inst.state_columns = momentum_columns(3);
    inst.energy = [inertia](const Vec& m) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) e += 0.5 * m(i) * m(i) / inertia(i);
        return e;
    };
    inst.constraint_residual = [](const Vec&) { return 0.0; };
    inst.conserved.emplace_back("m_square", [](const Vec& m) { return m.squaredNorm(); });
    inst.tolerances = {{"energy", 1e-9}, {"m_square", 1e-9}};
    inst.mk_lo = Vec::Constant(3, -2.0);
    inst.mk_hi = Vec::Constant(3, 2.0);
    return inst;
}

struct MechanicalScenario {
    std::string name;
    FrameField frame;
    int s = 0;
    MechanicalSystem mech;             // frame-side ingredients
    HamiltonianHandle hamiltonian;     // overrides mech when value is set
    OracleSystem oracle;               // plain-coordinate twin
    Vec q_lo, q_hi, mk_lo, mk_hi;
};

ScenarioInstance wire_mechanical(const MechanicalScenario& def, const Vec& q0, const Vec& mk0) {
    ScenarioInstance inst;
    inst.name = def.name;
    const int n = def.frame.chart.dim;
    inst.n = n;
    inst.s = def.s;
    inst.r = n - def.s;

    ConstraintSplit split{def.frame, def.s};
    HamiltonianHandle h = def.hamiltonian.value ? def.hamiltonian : mechanical_hamiltonian(def.mech);
    inst.split = split;
    inst.hamiltonian = h;

    inst.field = [h, split, n](double, const Vec& y) {
        DalembertField d = dalembert_field(h, split, y.head(n), y.tail(split.s));
        Vec dy(n + split.s);
        dy << d.qdot, d.mdot_k;
        return dy;
    };
    Vec y0(n + def.s);
    y0 << q0, mk0;
    inst.y0 = y0;
    for (int i = 1; i <= n; ++i) inst.state_columns.push_back("q_" + std::to_string(i));
    for (const auto& c : momentum_columns(def.s)) inst.state_columns.push_back(c);

    HamiltonianHandle compressed = compress_hamiltonian(h, split);
    inst.energy = [compressed, n, s = def.s](const Vec& y) {
        return compressed.value(y.head(n), y.tail(s));
    };
    inst.constraint_residual = [h, split, n](const Vec& y) {
        const int r = split.r();
        if (r == 0) return 0.0;
        Vec q = y.head(n);
        Vec m_alpha = solve_constraint_surface(h, split, q, y.tail(split.s));
        Vec m_full(n);
        m_full << y.tail(split.s), m_alpha;
        return hamiltonian_grad_m(h, q, m_full).tail(r).cwiseAbs().maxCoeff();
    };
    inst.conserved.emplace_back("velocity_annihilation", [h, split, n](const Vec& y) {
        if (split.r() == 0) return 0.0;
        DalembertField d = dalembert_field(h, split, y.head(n), y.tail(split.s));
        FrameEval fe = eval_frame(split.frame, y.head(n));
        return (fe.A * d.qdot).tail(split.r()).cwiseAbs().maxCoeff();
    });
    if (inst.r > 0) {
        inst.multipliers_fn = [h, split, n](const Vec& y) {
            return multipliers(h, split, y.head(n), y.tail(split.s)).lam;
        };
    }

    inst.to_comparable = [h, split, n](double, const Vec& y) {
        DalembertField d = dalembert_field(h, split, y.head(n), y.tail(split.s));
        Vec out(2 * n);
        out << y.head(n), d.qdot;
        return out;
    };

    inst.oracle = def.oracle;
    inst.oracle_q0 = q0;
    inst.oracle_qdot0 = dalembert_field(h, split, q0, mk0).qdot;

    if (inst.r > 0) {
        // Fixed row mix between the raw constraint rows and the transversal
        // coframe rows, fitted once over deterministic sample points.
        std::mt19937_64 rng(0xC0FFEEull);
        std::vector<Vec> samples;
        for (int i = 0; i < 5; ++i) samples.push_back(sample_box(rng, def.q_lo, def.q_hi));
        auto coframe_rows = [frame = def.frame, s = def.s](const Vec& q) {
            return Mat(eval_frame(frame, q).A.bottomRows(frame.chart.dim - s));
        };
        inst.multiplier_mix = multiplier_row_mix(def.oracle.constraint_matrix, coframe_rows, samples);
    }

    inst.q_lo = def.q_lo;
    inst.q_hi = def.q_hi;
    inst.mk_lo = def.mk_lo;
    inst.mk_hi = def.mk_hi;

    inst.tolerances = {{"energy", 1e-8},
                       {"constraint_residual", 1e-8},
                       {"velocity_annihilation", 1e-10},
                       {"field_equivalence", 1e-10},
                       {"almost_casimir", 1e-10},
                       {"oracle_sup_deviation", 1e-6},
                       {"multiplier_sup_deviation", 1e-6}};
    return inst;
}

HamiltonianHandle flat_kinetic_hamiltonian(double mass, std::function<double(const Vec&)> potential,
                                           std::function<Vec(const Vec&)> potential_gradient) {
    // Kinetic metric chosen so the moving frame is orthonormal: the
    // quasi-momentum metric is the identity over the mass.
    HamiltonianHandle h;
    h.quadratic_in_m = true;
    h.value = [mass, potential](const Vec& q, const Vec& m) {
        double e = 0.5 * m.squaredNorm() / mass;
        if (potential) e += potential(q);
        return e;
    };
    h.grad_m = [mass](const Vec&, const Vec& m) { return Vec(m / mass); };
    h.grad_q = [potential_gradient](const Vec& q, const Vec& m) {
        return potential_gradient ? potential_gradient(q) : Vec(Vec::Zero(m.size()));
    };
    h.hess_mm = [mass](const Vec& q, const Vec&) {
        return Mat(Mat::Identity(q.size(), q.size()) / mass);
    };
    return h;
}

ScenarioInstance make_heisenberg(const std::map<std::string, double>& params, const Vec& q0,
                                 const Vec& mk0) {
    const double mass = params.at("mass");
    MechanicalScenario def;
    def.name = "heisenberg_particle";
    def.frame = heisenberg_frame();
    def.s = 2;
    def.hamiltonian = flat_kinetic_hamiltonian(mass, nullptr, nullptr);

    def.oracle.n = 3;
    def.oracle.r = 1;
    def.oracle.mass_matrix = [mass](const Vec& q) {
        const double y = q(1);
        Mat M(3, 3);
        M << 1 + y * y, 0, -y, 0, 1, 0, -y, 0, 1;
        return Mat(mass * M);
    };
    def.oracle.constraint_matrix = [](const Vec& q) {
        Mat A(1, 3);
        A << -q(1), 0, 1;
        return A;
    };

    def.q_lo = Vec::Constant(3, -1.0);
    def.q_hi = Vec::Constant(3, 1.0);
    def.mk_lo = Vec::Constant(2, -2.0);
    def.mk_hi = Vec::Constant(2, 2.0);
    return wire_mechanical(def, q0, mk0);
}

ScenarioInstance make_vertical_disk(const std::map<std::string, double>& params, const Vec& q0,
                                    const Vec& mk0) {
    const double mass = params.at("mass");
    const double radius = params.at("radius");
    const double inertia_spin = params.at("inertia_spin");
    const double inertia_turn = params.at("inertia_turn");

    MechanicalScenario def;
    def.name = "vertical_disk";
    def.frame = vertical_disk_frame(radius);
    def.s = 2;

    Vec diag(4);
    diag << inertia_turn, inertia_spin, mass, mass;
    def.mech.frame = def.frame;
    def.mech.constant_mass = true;
    def.mech.mass_matrix = [diag](const Vec&) { return Mat(diag.asDiagonal()); };

    def.oracle.n = 4;
    def.oracle.r = 2;
    def.oracle.mass_matrix = [diag](const Vec&) { return Mat(diag.asDiagonal()); };
    def.oracle.constraint_matrix = [radius](const Vec& q) {
        const double c = std::cos(q(0)), s = std::sin(q(0));
        Mat A(2, 4);
        A << 0, -radius * c, 1, 0, 0, -radius * s, 0, 1;
        return A;
    };

    def.q_lo = Vec::Constant(4, -1.0);
    def.q_hi = Vec::Constant(4, 1.0);
    def.q_lo(0) = -2.0;
    def.q_hi(0) = 2.0;
    def.mk_lo = Vec::Constant(2, -2.0);
    def.mk_hi = Vec::Constant(2, 2.0);

    ScenarioInstance inst = wire_mechanical(def, q0, mk0);
    // Steady-rolling first integrals.
    auto h = *inst.hamiltonian;
    auto split = *inst.split;
    inst.conserved.emplace_back("theta_dot", [h, split](const Vec& y) {
        return dalembert_field(h, split, y.head(4), y.tail(2)).v(0);
    });
    inst.conserved.emplace_back("phi_dot", [h, split](const Vec& y) {
        return dalembert_field(h, split, y.head(4), y.tail(2)).v(1);
    });
    return inst;
}

ScenarioInstance make_chaplygin_sleigh(const std::map<std::string, double>& params, const Vec& q0,
                                       const Vec& mk0) {
    const double mass = params.at("mass");
    const double inertia = params.at("inertia");
    const double offset = params.at("offset");

    auto mass_matrix = [mass, inertia, offset](const Vec& q) {
        const double c = std::cos(q(2)), s = std::sin(q(2));
        Mat M(3, 3);
        M << mass, 0, -mass * offset * s, 0, mass, mass * offset * c, -mass * offset * s,
            mass * offset * c, mass * offset * offset + inertia;
        return M;
    };

    MechanicalScenario def;
    def.name = "chaplygin_sleigh";
    def.frame = chaplygin_sleigh_frame();
    def.s = 2;
    def.mech.frame = def.frame;
    def.mech.mass_matrix = mass_matrix;
    def.mech.mass_derivative = [mass, offset](const Vec& q) {
        const double c = std::cos(q(2)), s = std::sin(q(2));
        Tensor3 t(3, 3, 3);
        t(0, 2, 2) = -mass * offset * c;
        t(2, 0, 2) = -mass * offset * c;
        t(1, 2, 2) = -mass * offset * s;
        t(2, 1, 2) = -mass * offset * s;
        return t;
    };

    def.oracle.n = 3;
    def.oracle.r = 1;
    def.oracle.mass_matrix = mass_matrix;
    def.oracle.constraint_matrix = [](const Vec& q) {
        Mat A(1, 3);
        A << -std::sin(q(2)), std::cos(q(2)), 0;
        return A;
    };

    def.q_lo = Vec::Constant(3, -1.0);
    def.q_hi = Vec::Constant(3, 1.0);
    def.q_lo(2) = -2.0;
    def.q_hi(2) = 2.0;
    def.mk_lo = Vec::Constant(2, -2.0);
    def.mk_hi = Vec::Constant(2, 2.0);
    return wire_mechanical(def, q0, mk0);
}

ScenarioInstance make_shear_demo(const std::map<std::string, double>& params, const Vec& q0,
                                 const Vec& mk0) {
    const double mass = params.at("mass");
    const double stiffness = params.at("stiffness");

    auto potential = [stiffness](const Vec& q) { return 0.5 * stiffness * q.squaredNorm(); };
    auto potential_gradient = [stiffness](const Vec& q) { return Vec(stiffness * q); };

    MechanicalScenario def;
    def.name = "shear_demo";
    def.frame = shear_frame();
    def.s = 2;
    def.hamiltonian = flat_kinetic_hamiltonian(mass, potential, potential_gradient);

    def.oracle.n = 2;
    def.oracle.r = 0;
    def.oracle.mass_matrix = [mass](const Vec& q) {
        const double a = q(0);
        Mat M(2, 2);
        M << 1 + a * a, a, a, 1;
        return Mat(mass * M);
    };
    def.oracle.potential = potential;
    def.oracle.potential_gradient = potential_gradient;

    def.q_lo = Vec::Constant(2, -1.0);
    def.q_hi = Vec::Constant(2, 1.0);
    def.mk_lo = Vec::Constant(2, -2.0);
    def.mk_hi = Vec::Constant(2, 2.0);
    return wire_mechanical(def, q0, mk0);
}

}  // namespace

ScenarioInstance make_scenario(const std::string& name,
                               const std::map<std::string, double>& parameters,
                               const std::optional<Vec>& initial_q,
                               const std::optional<Vec>& initial_m) {
    const ScenarioInfo& info = scenario_info(name);
    auto params = resolve_parameters(info, parameters);

    Vec q0, mk0;
    if (info.q_dim > 0) {
        q0 = initial_q.value_or(Vec::Zero(info.q_dim));
        if (q0.size() != info.q_dim)
            throw ConfigError("scenario " + name + ": initial q must have " +
                              std::to_string(info.q_dim) + " entries");
    } else if (initial_q && initial_q->size() > 0) {
        throw ConfigError("scenario " + name + " takes no configuration coordinates");
    }

    Vec default_m;
    if (name == "rigid_body") {
        default_m = Vec::Ones(3);
    } else if (name == "heisenberg_particle") {
        default_m = Vec(2);
        default_m << 1.0, 0.5;
    } else if (name == "vertical_disk") {
        default_m = Vec(2);
        default_m << 0.2, 1.0;
    } else if (name == "chaplygin_sleigh") {
        default_m = Vec(2);
        default_m << 1.0, 0.6;
    } else {
        default_m = Vec(2);
        default_m << 0.8, 0.4;
    }
    mk0 = initial_m.value_or(default_m);
    if (mk0.size() != info.m_dim)
        throw ConfigError("scenario " + name + ": initial m must have " +
                          std::to_string(info.m_dim) + " entries");

    if (name == "rigid_body") return make_rigid_body(params, mk0);
    if (name == "heisenberg_particle") return make_heisenberg(params, q0, mk0);
    if (name == "vertical_disk") return make_vertical_disk(params, q0, mk0);
    if (name == "chaplygin_sleigh") return make_chaplygin_sleigh(params, q0, mk0);
    if (name == "shear_demo") return make_shear_demo(params, q0, mk0);
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace nonholo
