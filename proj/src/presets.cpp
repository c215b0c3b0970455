#include "ldplab/presets.hpp"

#include "ldplab/norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>

namespace ldplab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json default_manifest(const std::string& system) {
    json j;
    j["system"] = system;
    j["seed"] = 1;
    j["grid"] = {{"n", system == "ou_scalar" ? 4 : 32}, {"period", 2.0 * std::numbers::pi}};
    j["solver"] = {{"dt", 5e-4},          {"T", 0.5},
                   {"dealias", true},     {"epsilon", 0.1},
                   {"eta_mode", "none"},  {"eta", 0.0},
                   {"blowup_cap", 1e6},   {"control_bound", 100.0},
                   {"mode", "ito"}};
    j["coefficients"] = json::object();
    j["initial"] = {{"kind", "preset_default"}};
    j["control"] = {{"kind", "zero"}};
    j["event"] = {{"kind", "preset_default"}};
    j["ladder"] = {{"values", {0.2, 0.1, 0.05}}, {"samples_per_eps", 1000}, {"seed_base", 1}};
    j["rate"] = {{"penalties", {1e2, 1e3, 1e4, 1e5, 1e6}},
                 {"max_iters", 200},
                 {"grad_mode", system == "ou_scalar" || system == "heat_linear" ? "adjoint" : "fd"},
                 {"tol", 1e-3}};
    j["target"] = {{"kind", "event"}};
    j["mc"] = {{"n", 1000}};
    j["converge"] = {{"n", 200}};
    j["tightness"] = {{"gammas", {1.0, 2.0, 4.0, 8.0}}, {"n", 1000}};
    j["checks"] = {{"samples", 2000}, {"full_coercivity", false}, {"box", 8.0}};
    j["tasks"] = {"checks"};
    return j;
}

std::vector<Vec2> parse_vec2_list(const json& j) {
    std::vector<Vec2> out;
    for (const auto& e : j) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return out;
}

std::vector<double> default_g_weights(int modes, double amp) {
    // supported on the upper half of the mode range, disjoint from the
    // transport directions that occupy the leading modes
    std::vector<double> w(modes, 0.0);
    double c = amp;
    for (int m = modes / 2; m < modes; ++m, c *= 0.5) w[m] = c;
    return w;
}

GKind parse_gkind(const std::string& s) {
    if (s == "zero") return GKind::zero;
    if (s == "bounded") return GKind::bounded;
    if (s == "stressor") return GKind::stressor;
    if (s == "quad_odd") return GKind::quad_odd;
    throw std::invalid_argument("unknown g family kind: " + s);
}

Tensor2 diag_tensor(double nu) {
    Tensor2 t;
    t[0][0] = ScalarCoeff(nu);
    t[0][1] = ScalarCoeff(0.0);
    t[1][0] = ScalarCoeff(0.0);
    t[1][1] = ScalarCoeff(nu);
    return t;
}

Tensor2 parse_tensor(const json& j) {
    Tensor2 t;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) t[r][c] = ScalarCoeff(j.at(r).at(c).get<double>());
    return t;
}

} // namespace

ExperimentManifest ExperimentManifest::from_json(json user) {
    if (!user.contains("system")) throw std::invalid_argument("manifest: missing \"system\"");
    const std::string system = user["system"].get<std::string>();
    json merged = default_manifest(system);
    merged.merge_patch(user);
    ExperimentManifest m;
    m.raw = std::move(merged);
    m.system = system;
    m.seed = m.raw["seed"].get<uint64_t>();
    return m;
}

namespace {

SolverConfig parse_solver(const json& j) {
    SolverConfig cfg;
    cfg.dt = j.at("dt").get<double>();
    cfg.horizon = j.at("T").get<double>();
    cfg.dealias = j.at("dealias").get<bool>();
    cfg.epsilon = j.at("epsilon").get<double>();
    const std::string eta = j.at("eta_mode").get<std::string>();
    cfg.eta_mode = eta == "none"          ? EtaMode::none
                   : eta == "stratonovich" ? EtaMode::stratonovich
                   : eta == "custom"       ? EtaMode::custom
                                           : throw std::invalid_argument("bad eta_mode: " + eta);
    cfg.eta_custom = j.at("eta").get<double>();
    cfg.blowup_cap = j.at("blowup_cap").get<double>();
    cfg.control_bound = j.at("control_bound").get<double>();
    if (!(cfg.dt > 0) || !(cfg.epsilon >= 0))
        throw std::invalid_argument("solver: dt > 0 and epsilon >= 0 required");
    return cfg;
}

SpectralField build_initial(const ExperimentManifest& m, const PresetBundle& b);

EventSpec parse_event(const json& j, const std::string& system) {
    EventSpec e;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "preset_default") {
        if (system == "ou_scalar") {
            e.kind = EventSpec::Kind::sup_mean;
            e.threshold = 1.0;
            return e;
        }
        if (system == "brusselator") {
            e.kind = EventSpec::Kind::terminal_component_h;
            e.component = 1;
            e.threshold = -1.0;  // resolved relative to the zero-control path
            return e;
        }
        e.kind = EventSpec::Kind::sup_h_norm;
        e.threshold = -1.0;
        return e;
    }
    if (kind == "always_true") e.kind = EventSpec::Kind::always_true;
    else if (kind == "sup_mean") e.kind = EventSpec::Kind::sup_mean;
    else if (kind == "terminal_mean") e.kind = EventSpec::Kind::terminal_mean;
    else if (kind == "sup_h_norm") e.kind = EventSpec::Kind::sup_h_norm;
    else if (kind == "terminal_h_norm") e.kind = EventSpec::Kind::terminal_h_norm;
    else if (kind == "terminal_component_h") e.kind = EventSpec::Kind::terminal_component_h;
    else throw std::invalid_argument("unknown event kind: " + kind);
    e.threshold = j.value("threshold", -1.0);
    e.component = j.value("component", 0);
    e.absolute = j.value("absolute", false);
    return e;
}

} // namespace

PresetBundle build_system(const ExperimentManifest& m) {
    const json& j = m.raw;
    const json& c = j.at("coefficients");
    PresetBundle b;
    b.system = m.system;
    b.solver = parse_solver(j.at("solver"));

    const int n = j.at("grid").at("n").get<int>();
    const double period = j.at("grid").at("period").get<double>();

    if (m.system == "brusselator") {
        const TorusGrid grid = TorusGrid::make(n, period, 2);
        BrusselatorCoefficients::Config cfg;
        const int modes = c.value("noise_modes", 8);
        cfg.a1 = c.contains("a1") ? parse_tensor(c["a1"]) : diag_tensor(c.value("nu1", 1.0));
        cfg.a2 = c.contains("a2") ? parse_tensor(c["a2"]) : diag_tensor(c.value("nu2", 1.0));
        const double bamp = c.value("b_amp", 0.5);
        cfg.b1.assign(modes, {0.0, 0.0});
        cfg.b2.assign(modes, {0.0, 0.0});
        if (c.contains("b1")) {
            cfg.b1 = parse_vec2_list(c["b1"]);
            cfg.b2 = parse_vec2_list(c["b2"]);
        } else if (modes >= 2 && bamp != 0.0) {
            cfg.b1[0] = {bamp, 0.0};
            cfg.b1[1] = {0.0, bamp};
            cfg.b2[0] = {0.0, bamp};
            cfg.b2[1] = {bamp, 0.0};
        }
        cfg.g_family.kind = parse_gkind(c.value("g_kind", std::string("bounded")));
        if (c.contains("g_weights"))
            cfg.g_family.weights = c["g_weights"].get<std::vector<double>>();
        else
            cfg.g_family.weights = default_g_weights(modes, c.value("g_amp", 0.2));
        const auto lam = c.value("lambda", std::vector<double>{0.5, -0.2, 0.1});
        const auto mu = c.value("mu", std::vector<double>{0.3, 0.1, -0.2});
        cfg.lambda0 = lam[0]; cfg.lambda1 = lam[1]; cfg.lambda2 = lam[2];
        cfg.mu0 = mu[0]; cfg.mu1 = mu[1]; cfg.mu2 = mu[2];
        cfg.M = c.value("M", 0.4);
        cfg.delta = c.value("delta", 0.4);
        cfg.epsilon_growth = c.value("epsilon_growth", 0.5);
        b.coeffs = BrusselatorCoefficients::make(grid, cfg);

        // pinned preset exponents
        const auto& p = b.coeffs->params();
        if (p.drift[1].rho_hat != 2.0 || p.drift[1].beta_hat != 5.0 / 6.0 ||
            p.drift[1].alpha != 0.5 || p.diffusion[0].rho != 1.0 || p.diffusion[0].beta != 0.75)
            throw std::logic_error("brusselator preset exponents drifted from their pinned values");
    } else if (m.system == "allen_cahn") {
        const TorusGrid grid = TorusGrid::make(n, period, 1);
        AllenCahnCoefficients::Config cfg;
        const int modes = c.value("noise_modes", 8);
        cfg.b.assign(modes, {0.0, 0.0});
        if (c.contains("b")) {
            cfg.b = parse_vec2_list(c["b"]);
        } else if (modes >= 2) {
            cfg.b[0] = {0.8, 0.0};
            cfg.b[1] = {0.0, 0.6};
        }
        cfg.g_family.kind = parse_gkind(c.value("g_kind", std::string("quad_odd")));
        if (c.contains("g_weights"))
            cfg.g_family.weights = c["g_weights"].get<std::vector<double>>();
        else {
            cfg.g_family.weights.assign(cfg.b.size(), 0.0);
            const double ga = c.value("g_amp", 0.5);
            double w = ga;
            for (size_t q = 2; q < cfg.g_family.weights.size() && q < 6; ++q, w *= 0.6)
                cfg.g_family.weights[q] = w;
        }
        double c1 = 0.0;
        if (cfg.g_family.kind == GKind::quad_odd)
            for (double w : cfg.g_family.weights) c1 += w * w;
        cfg.C1 = c.value("C1", c1);
        cfg.C0 = c.value("C0", 1.0);
        b.coeffs = AllenCahnCoefficients::make(grid, cfg);
        const auto ac = std::static_pointer_cast<AllenCahnCoefficients>(b.coeffs);
        if (!check_allen_cahn_noise(ac->b_l2sq(), cfg.C0, cfg.C1).passed())
            throw std::logic_error("allen_cahn preset violates its own noise-smallness check");
    } else if (m.system == "navier_stokes") {
        const TorusGrid grid = TorusGrid::make(n, period, 2);
        NavierStokesCoefficients::Config cfg;
        cfg.nu = c.value("nu", 0.5);
        cfg.b = c.contains("b") ? parse_vec2_list(c["b"])
                                : std::vector<Vec2>{{0.4, 0.0}, {0.0, 0.4}};
        cfg.correction_weight = c.value("correction_weight", 0.0);
        b.coeffs = NavierStokesCoefficients::make(grid, cfg);
    } else if (m.system == "ou_scalar" || m.system == "heat_linear") {
        const TorusGrid grid = TorusGrid::make(n, period, 1);
        ScalarLinearCoefficients::Config cfg;
        if (m.system == "ou_scalar") {
            cfg.lambda = c.value("lambda", 1.0);
            cfg.nu = c.value("nu", 1.0);
            cfg.b_mult = c.value("b", 0.0);
            cfg.sigma_add = c.value("sigma", 1.0);
        } else {
            cfg.lambda = c.value("lambda", 0.0);
            cfg.nu = c.value("nu", 1.0);
            cfg.b_mult = c.value("b", 0.0);
            cfg.sigma_add = c.value("sigma", 0.0);
        }
        cfg.noise_modes = c.value("noise_modes", 1);
        b.coeffs = ScalarLinearCoefficients::make(grid, cfg);
        b.oracle_preset = true;
    } else {
        throw std::invalid_argument("unknown system: " + m.system);
    }

    b.event = parse_event(j.at("event"), m.system);
    b.initial = build_initial(m, b);
    return b;
}

namespace {

SpectralField build_initial(const ExperimentManifest& m, const PresetBundle& b) {
    const json& j = m.raw.at("initial");
    const TorusGrid& g = b.coeffs->grid();
    const std::string kind = j.at("kind").get<std::string>();
    auto grid_fn = [&](auto&& fn) {
        std::vector<double> vals(static_cast<size_t>(g.points()) * g.components);
        for (int c = 0; c < g.components; ++c)
            for (int i2 = 0; i2 < g.n; ++i2)
                for (int i1 = 0; i1 < g.n; ++i1)
                    vals[(static_cast<size_t>(c) * g.n + i2) * g.n + i1] =
                        fn(c, i1 * g.dx(), i2 * g.dx());
        return SpectralField::from_physical(g, vals);
    };

    SpectralField out(g);
    if (kind == "zero") {
        // keep zeros
    } else if (kind == "constant") {
        out = SpectralField::constant(g, j.at("values").get<std::vector<double>>());
    } else if (kind == "mode") {
        const int k1 = j.at("k").at(0).get<int>(), k2 = j.at("k").at(1).get<int>();
        const double amp = j.value("amplitude", 1.0);
        const int comp = j.value("component", 0);
        out.set_mode(comp, k1, k2, cplx(0.0, -0.5 * amp));  // amp*sin(k.x)
    } else if (kind == "sine_mode") {
        const int k1 = j.at("k").at(0).get<int>(), k2 = j.at("k").at(1).get<int>();
        const double amp = j.value("amplitude", 1.0);
        const double w1 = 2.0 * std::numbers::pi * k1 / g.period;
        const double w2 = 2.0 * std::numbers::pi * k2 / g.period;
        out = grid_fn([&](int, double x, double y) { return amp * std::sin(w1 * x) * std::sin(w2 * y); });
    } else if (kind == "taylor_green") {
        const double amp = j.value("amplitude", 0.5);
        const double w = 2.0 * std::numbers::pi / g.period;
        out = grid_fn([&](int c, double x, double y) {
            return c == 0 ? amp * std::sin(w * x) * std::cos(w * y)
                          : -amp * std::cos(w * x) * std::sin(w * y);
        });
    } else if (kind == "random") {
        out = random_field(g, {j.value("seed", m.seed), j.value("amplitude", 0.1), 2.0, -1, false});
    } else if (kind == "file") {
        out = read_field_file(j.at("file").get<std::string>());
    } else if (kind == "preset_default") {
        if (b.system == "brusselator") {
            out = grid_fn([&](int c, double x, double y) {
                const double w = 2.0 * std::numbers::pi / g.period;
                return c == 0 ? 0.1 + 0.05 * std::cos(w * x) * std::cos(w * y)
                              : 0.1 + 0.05 * std::sin(w * x) * std::sin(w * y);
            });
        } else if (b.system == "allen_cahn") {
            const double w = 2.0 * std::numbers::pi / g.period;
            out = grid_fn([&](int, double x, double y) {
                return 0.3 * std::sin(w * x) * std::sin(w * y);
            });
        } else if (b.system == "navier_stokes") {
            const double w = 2.0 * std::numbers::pi / g.period;
            out = grid_fn([&](int c, double x, double y) {
                return c == 0 ? 0.5 * std::sin(w * x) * std::cos(w * y)
                              : -0.5 * std::cos(w * x) * std::sin(w * y);
            });
        } else if (b.system == "heat_linear") {
            out.set_mode(0, 1, 0, cplx(0.0, -0.5));  // sin(x)
        }
        // ou_scalar: zero start
    } else {
        throw std::invalid_argument("unknown initial kind: " + kind);
    }
    dealias(out);
    b.coeffs->project_state(out);
    return out;
}

} // namespace

Control build_control(const ExperimentManifest& m, const PresetBundle& bundle) {
    const json& j = m.raw.at("control");
    const std::string kind = j.at("kind").get<std::string>();
    const SolverConfig& s = bundle.solver;
    const int steps = static_cast<int>(std::lround(s.horizon / s.dt));
    const int modes = bundle.coeffs->noise_modes();
    if (kind == "zero") return Control::zero(steps, modes, s.dt);
    if (kind == "file") return read_control_file(j.at("file").get<std::string>());
    Control c = Control::zero(steps, modes, s.dt);
    const double amp = j.value("amplitude", 1.0);
    const int mode = j.value("mode", 0);
    if (mode >= modes) throw std::invalid_argument("control: mode index out of range");
    if (kind == "constant") {
        for (int i = 0; i < steps; ++i) c.at(i, mode) = amp;
    } else if (kind == "sine") {
        for (int i = 0; i < steps; ++i)
            c.at(i, mode) = amp * std::sin(2.0 * std::numbers::pi * (i + 0.5) / steps);
    } else {
        throw std::invalid_argument("unknown control kind: " + kind);
    }
    c.refresh_cost();
    return c;
}

std::vector<CheckReport> run_eager_checks(const ExperimentManifest& m) {
    PresetBundle b = build_system(m);
    std::vector<CheckReport> reports;
    const auto& p = b.coeffs->params();
    for (const auto& d : p.diffusion) reports.push_back(check_subcriticality(d.rho, d.beta));
    for (const auto& d : p.drift)
        reports.push_back(check_alpha_subcriticality(d.rho_hat, d.beta_hat, d.alpha));
    // what-if exponent overrides declared in the manifest are validated too
    if (m.raw["coefficients"].contains("exponents")) {
        const json& ex = m.raw["coefficients"]["exponents"];
        if (ex.contains("diffusion"))
            for (const auto& e : ex["diffusion"])
                reports.push_back(check_subcriticality(e.at(0).get<double>(), e.at(1).get<double>()));
        if (ex.contains("drift"))
            for (const auto& e : ex["drift"])
                reports.push_back(check_alpha_subcriticality(
                    e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()));
    }
    if (m.system == "brusselator") {
        const auto bruss = std::static_pointer_cast<BrusselatorCoefficients>(b.coeffs);
        reports.push_back(check_parabolicity(*bruss, 64));
        reports.push_back(check_growth_envelope(*bruss, 2000, m.raw["checks"].value("box", 8.0),
                                                m.seed));
    }
    if (m.system == "allen_cahn") {
        const auto ac = std::static_pointer_cast<AllenCahnCoefficients>(b.coeffs);
        reports.push_back(
            check_allen_cahn_noise(ac->b_l2sq(), ac->config().C0, ac->config().C1));
    }
    return reports;
}

ExperimentManifest load_manifest(const std::string& path) {
    json user;
    {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open manifest: " + path);
        try {
            is >> user;
        } catch (const json::exception& e) {
            throw std::runtime_error(std::string("manifest parse error: ") + e.what());
        }
    }
    ExperimentManifest m = ExperimentManifest::from_json(std::move(user));
    for (auto& r : run_eager_checks(m))
        if (!r.passed()) throw ValidationError(std::move(r));
    return m;
}

std::string manifest_hash(const ExperimentManifest& m) {
    const std::string s = m.raw.dump();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_control_file(const std::string& path, const Control& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os.write("LDPC", 4);
    const uint32_t steps = c.steps, modes = c.modes;
    os.write(reinterpret_cast<const char*>(&steps), 4);
    os.write(reinterpret_cast<const char*>(&modes), 4);
    os.write(reinterpret_cast<const char*>(&c.dt), 8);
    os.write(reinterpret_cast<const char*>(c.values.data()),
             static_cast<std::streamsize>(c.values.size() * sizeof(double)));
}

Control read_control_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LDPC", 4) != 0)
        throw std::runtime_error("control read: bad magic");
    uint32_t steps = 0, modes = 0;
    double dt = 0;
    is.read(reinterpret_cast<char*>(&steps), 4);
    is.read(reinterpret_cast<char*>(&modes), 4);
    is.read(reinterpret_cast<char*>(&dt), 8);
    std::vector<double> values(static_cast<size_t>(steps) * modes);
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("control read: truncated");
    return Control::make(static_cast<int>(steps), static_cast<int>(modes), dt, std::move(values));
}

// ---------------------------------------------------------------------------
// run_manifest
// ---------------------------------------------------------------------------

namespace {

struct CsvWriter {
    std::ofstream os;
    explicit CsvWriter(const std::string& path, const std::string& header) : os(path) {
        if (!os) throw std::runtime_error("cannot open for write: " + path);
        os << header << "\n";
    }
    void row(std::initializer_list<double> cells) {
        char buf[64];
        bool first = true;
        for (double c : cells) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            os << (first ? "" : ",") << buf;
            first = false;
        }
        os << "\n";
    }
};

RateQuery rate_query_from(const ExperimentManifest& m, const PresetBundle& b,
                          const EventSpec& event) {
    const json& rj = m.raw.at("rate");
    RateQuery q;
    q.T = b.solver.horizon;
    q.penalty_schedule = rj.at("penalties").get<std::vector<double>>();
    q.max_iters = rj.at("max_iters").get<int>();
    q.grad_mode = rj.at("grad_mode").get<std::string>() == "adjoint" ? GradMode::adjoint_linear
                                                                     : GradMode::finite_difference;
    const json& tj = m.raw.at("target");
    if (tj.at("kind").get<std::string>() == "field") {
        TerminalTarget t{read_field_file(tj.at("file").get<std::string>()),
                         tj.value("tol", rj.value("tol", 1e-3))};
        q.target = std::move(t);
    } else {
        q.target = EventTarget{event, tj.value("tol", rj.value("tol", 1e-3))};
    }
    return q;
}

json estimate_json(const McEstimate& e) {
    return {{"p_hat", e.p_hat},       {"stderr", e.stderr_},
            {"n_hits", e.n_hits},     {"n_samples", e.n_samples},
            {"eps", e.eps},           {"importance_used", e.importance_used}};
}

} // namespace

EventSpec resolve_manifest_event(const PresetBundle& b, const ExperimentManifest& m) {
    EventSpec e = b.event;
    if (e.threshold >= 0.0) return e;
    // relative threshold: factor times the zero-control trajectory value
    const double factor = m.raw["event"].value("relative_factor", 1.5);
    SolverConfig det = b.solver;
    det.epsilon = 0.0;
    const int steps = static_cast<int>(std::lround(det.horizon / det.dt));
    const Control zero = Control::zero(steps, b.coeffs->noise_modes(), det.dt);
    const Trajectory base = solve_skeleton(*b.coeffs, b.initial, zero, det.horizon, det);
    e.threshold = factor * e.value(base);
    return e;
}

SimOutcome simulate_from_manifest(const ExperimentManifest& m, const PresetBundle& bundle,
                                  const std::string& mode) {
    SolverConfig cfg = bundle.solver;
    const Control psi = build_control(m, bundle);
    SimOutcome out;
    if (mode == "skeleton") {
        cfg.epsilon = 0.0;
        out.traj = solve_skeleton(*bundle.coeffs, bundle.initial, psi, cfg.horizon, cfg);
    } else {
        const int steps = static_cast<int>(std::lround(cfg.horizon / cfg.dt));
        const NoisePath noise = NoisePath::make(m.seed, steps, bundle.coeffs->noise_modes(), cfg.dt);
        if (mode == "ito") {
            out.traj = solve_spde(*bundle.coeffs, bundle.initial, noise, cfg);
        } else if (mode == "tilted") {
            out.traj = solve_tilted(*bundle.coeffs, bundle.initial, psi, noise, cfg);
        } else if (mode == "stratonovich") {
            cfg.eta_mode = EtaMode::stratonovich;
            DriftPerturbation tilde;
            if (m.system == "navier_stokes")
                tilde = ns_strat_correction(
                    std::static_pointer_cast<NavierStokesCoefficients>(bundle.coeffs));
            else if (m.system == "ou_scalar" || m.system == "heat_linear")
                tilde = scalar_strat_correction(
                    std::static_pointer_cast<ScalarLinearCoefficients>(bundle.coeffs));
            else
                throw std::invalid_argument(
                    "stratonovich mode needs a system with a correction operator");
            out.traj = solve_perturbed(*bundle.coeffs, tilde, bundle.initial, noise, cfg);
        } else {
            throw std::invalid_argument("unknown simulate mode: " + mode);
        }
    }
    out.sidecar = {{"manifest_hash", manifest_hash(m)}, {"seed", m.seed},
                   {"mode", mode},                      {"eps", cfg.epsilon},
                   {"blown_up", out.traj.blown_up},     {"mr_norm", mr_norm(out.traj)}};
    if (m.system == "brusselator" && mode == "skeleton") {
        const auto bruss = std::static_pointer_cast<BrusselatorCoefficients>(bundle.coeffs);
        const EnergyAudit audit = energy_bound_audit(*bruss, out.traj, psi);
        out.sidecar["energy_audit"] = {{"pass", audit.pass},
                                       {"mr", audit.mr},
                                       {"log10_bound", audit.log10_bound}};
        if (!audit.pass) ++out.failures;
    }
    return out;
}

RateResult rate_from_manifest(const ExperimentManifest& m, const PresetBundle& bundle,
                              const EventSpec& event) {
    return evaluate_rate(*bundle.coeffs, bundle.initial, rate_query_from(m, bundle, event),
                         bundle.solver);
}

int run_manifest(const ExperimentManifest& m, const std::string& outdir) {
    fs::create_directories(outdir);
    std::ofstream log(fs::path(outdir) / "run.log");
    auto stamp = [&](const std::string& msg) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        log << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << " " << msg
            << "\n";
        log.flush();
    };

    PresetBundle bundle = build_system(m);
    const std::string hash = manifest_hash(m);
    int failures = 0;
    json summary;
    summary["system"] = m.system;
    summary["version"] = kToolVersion;
    summary["manifest_hash"] = hash;
    summary["oracle_preset"] = bundle.oracle_preset;
    summary["artifacts"] = json::array();
    auto link = [&](const std::string& file, const std::string& op, const std::string& claim) {
        summary["artifacts"].push_back({{"file", file}, {"operation", op}, {"claim", claim}});
    };
    write_text_file((fs::path(outdir) / "manifest.json").string(), m.raw.dump(2) + "\n");

    const auto tasks = m.raw.at("tasks").get<std::vector<std::string>>();
    auto wants = [&](const std::string& t) {
        return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
    };

    std::optional<RateResult> rate_result;
    std::optional<EventSpec> resolved_event;
    auto event_of = [&]() -> const EventSpec& {
        if (!resolved_event) resolved_event = resolve_manifest_event(bundle, m);
        return *resolved_event;
    };

    for (const std::string& task : tasks) {
        stamp("task " + task);
        try {
            if (task == "checks") {
                json arr = json::array();
                auto reports = run_eager_checks(m);
                const long samples = m.raw["checks"].value("samples", 2000);
                reports.push_back(check_linear_coercivity(*bundle.coeffs, samples, m.seed));
                if (m.raw["checks"].value("full_coercivity", false))
                    reports.push_back(check_full_coercivity(*bundle.coeffs, samples, m.seed));
                for (auto& r : reports) {
                    if (!r.passed()) ++failures;
                    arr.push_back(r.to_json());
                }
                write_text_file((fs::path(outdir) / "checks.json").string(), arr.dump(2) + "\n");
                link("checks.json", "assumption_checker", "structural hypotheses hold as configured");
            } else if (task == "skeleton" || task == "simulate") {
                const std::string mode =
                    task == "skeleton" ? "skeleton" : m.raw["solver"].value("mode", "ito");
                SimOutcome sim = simulate_from_manifest(m, bundle, mode);
                failures += sim.failures;
                const std::string base = task == "skeleton" ? "traj_skeleton" : "traj";
                write_trajectory_file((fs::path(outdir) / (base + ".bin")).string(), sim.traj);
                write_text_file((fs::path(outdir) / (base + ".json")).string(),
                                sim.sidecar.dump(2) + "\n");
                link(base + ".bin", mode == "skeleton" ? "solve_skeleton" : "solve_" + mode,
                     "time-discretized trajectory of the configured system");
            } else if (task == "rate") {
                rate_result = rate_from_manifest(m, bundle, event_of());
                json rj;
                rj["value"] = rate_result->converged ? json(rate_result->value) : json("inf");
                rj["converged"] = rate_result->converged;
                rj["mismatch"] = rate_result->mismatch;
                rj["iterations"] = rate_result->iterations;
                rj["control_file"] = "control_opt.bin";
                write_control_file((fs::path(outdir) / "control_opt.bin").string(),
                                   rate_result->control);
                write_text_file((fs::path(outdir) / "rate.json").string(), rj.dump(2) + "\n");
                link("rate.json", "evaluate_rate", "upper bound on the control-cost infimum");
            } else if (task == "mc") {
                const EventSpec& ev = event_of();
                const long n = m.raw["mc"].value("n", 1000);
                const Control* imp =
                    rate_result && rate_result->converged ? &rate_result->control : nullptr;
                const McEstimate est = mc_probability(*bundle.coeffs, bundle.initial,
                                                      bundle.solver.epsilon, ev, n, m.seed, imp,
                                                      bundle.solver);
                CsvWriter csv((fs::path(outdir) / "mc.csv").string(),
                              "eps,estimate,stderr,n,seed_base,importance");
                csv.row({est.eps, est.p_hat, est.stderr_, static_cast<double>(est.n_samples),
                         static_cast<double>(m.seed), est.importance_used ? 1.0 : 0.0});
                summary["mc"] = estimate_json(est);
                link("mc.csv", "mc_probability", "event probability at the configured intensity");
            } else if (task == "curve") {
                if (!rate_result) rate_result = rate_from_manifest(m, bundle, event_of());
                const auto& lj = m.raw.at("ladder");
                const EpsilonLadder ladder = EpsilonLadder::make(
                    lj.at("values").get<std::vector<double>>(), lj.at("samples_per_eps").get<int>(),
                    lj.at("seed_base").get<uint64_t>());
                const auto rows = ldp_decay_curve(*bundle.coeffs, bundle.initial, event_of(),
                                                  ladder, *rate_result, bundle.solver);
                CsvWriter csv((fs::path(outdir) / "curve.csv").string(),
                              "eps,eps_log_p,neg_rate,estimate,stderr,n,degenerate");
                for (const auto& r : rows)
                    csv.row({r.eps, r.eps_log_p, r.neg_rate, r.estimate.p_hat, r.estimate.stderr_,
                             static_cast<double>(r.estimate.n_samples), r.degenerate ? 1.0 : 0.0});
                try {
                    summary["curve_intercept"] = decay_intercept(rows);
                } catch (const std::exception&) {
                    summary["curve_intercept"] = nullptr;
                }
                link("curve.csv", "ldp_decay_curve",
                     "rare-event decay exponent versus the control-cost bound");
            } else if (task == "converge") {
                const auto& lj = m.raw.at("ladder");
                const EpsilonLadder ladder = EpsilonLadder::make(
                    lj.at("values").get<std::vector<double>>(), m.raw["converge"].value("n", 200),
                    lj.at("seed_base").get<uint64_t>());
                const Control psi = build_control(m, bundle);
                const auto rows =
                    convergence_study(*bundle.coeffs, bundle.initial, psi, ladder, bundle.solver);
                CsvWriter csv((fs::path(outdir) / "converge.csv").string(),
                              "eps,median,q90,blown_up,n");
                for (const auto& r : rows)
                    csv.row({r.eps, r.median, r.q90, static_cast<double>(r.blown_up),
                             static_cast<double>(r.n)});
                link("converge.csv", "convergence_study",
                     "controlled paths approach the deterministic controlled trajectory");
            } else if (task == "tightness") {
                const auto& tj = m.raw.at("tightness");
                const auto gammas = tj.at("gammas").get<std::vector<double>>();
                const int n = tj.at("n").get<int>();
                const auto& lj = m.raw.at("ladder");
                const Control psi = build_control(m, bundle);
                std::vector<Control> family;
                if (!psi.is_zero()) family.push_back(psi);
                const auto rows = tightness_probe(*bundle.coeffs, bundle.initial, family,
                                                  lj.at("values").get<std::vector<double>>(),
                                                  gammas, n, m.seed, bundle.solver);
                CsvWriter csv((fs::path(outdir) / "tightness.csv").string(), "eps,gamma,tail,n");
                for (const auto& r : rows)
                    csv.row({r.eps, r.gamma, r.tail, static_cast<double>(r.n)});
                link("tightness.csv", "tightness_probe",
                     "uniform-in-intensity tail control of the trajectory norm");
            } else {
                throw std::invalid_argument("unknown task: " + task);
            }
        } catch (const std::exception& e) {
            ++failures;
            summary["errors"][task] = e.what();
            stamp("task " + task + " failed: " + e.what());
        }
    }

    summary["failures"] = failures;
    write_text_file((fs::path(outdir) / "summary.json").string(), summary.dump(2) + "\n");
    stamp("done");
    return failures;
}

} // namespace ldplab
