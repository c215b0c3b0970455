#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "ldplab/integrate.hpp"
#include "ldplab/systems.hpp"

using namespace ldplab;
using namespace test_util;

namespace {

std::shared_ptr<ScalarLinearCoefficients> scalar_sys(double lambda, double nu, double b,
                                                     double sigma, int n = 4) {
    ScalarLinearCoefficients::Config cfg;
    cfg.lambda = lambda;
    cfg.nu = nu;
    cfg.b_mult = b;
    cfg.sigma_add = sigma;
    return ScalarLinearCoefficients::make(grid(n, 1), cfg);
}

std::shared_ptr<BrusselatorCoefficients> small_bruss(int n = 16) {
    BrusselatorCoefficients::Config cfg;
    cfg.a1 = {{{ScalarCoeff(1.0), ScalarCoeff(0.0)}, {ScalarCoeff(0.0), ScalarCoeff(1.0)}}};
    cfg.a2 = cfg.a1;
    cfg.b1 = {{0.5, 0.0}, {0.0, 0.5}, {0, 0}, {0, 0}};
    cfg.b2 = {{0.0, 0.5}, {0.5, 0.0}, {0, 0}, {0, 0}};
    cfg.g_family.kind = GKind::bounded;
    cfg.g_family.weights = {0.0, 0.0, 0.2, 0.1};
    cfg.lambda0 = 0.5; cfg.lambda1 = -0.2; cfg.lambda2 = 0.1;
    cfg.mu0 = 0.3; cfg.mu1 = 0.1; cfg.mu2 = -0.2;
    cfg.M = 0.4; cfg.delta = 0.4; cfg.epsilon_growth = 0.5;
    return BrusselatorCoefficients::make(grid(n, 2), cfg);
}

bool bit_identical(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) return false;
    for (size_t j = 0; j < a.size(); ++j)
        for (size_t i = 0; i < a.states[j].data().size(); ++i)
            if (a.states[j].data()[i] != b.states[j].data()[i]) return false;
    return true;
}

} // namespace

TEST_CASE("noise path statistics and reproducibility") {
    const NoisePath p = NoisePath::make(42, 20000, 2, 1e-3);
    double var[2] = {0, 0};
    for (int j = 0; j < p.steps; ++j)
        for (int m = 0; m < 2; ++m) var[m] += p.incr(j, m) * p.incr(j, m);
    for (int m = 0; m < 2; ++m) {
        var[m] /= p.steps;
        CHECK(close_rel(var[m], 1e-3, 0.05));
    }
    const NoisePath q = NoisePath::make(42, 20000, 2, 1e-3);
    CHECK(std::equal(p.increments.begin(), p.increments.end(), q.increments.begin()));

    const NoisePath c = p.coarsen(2);
    CHECK(c.steps == 10000);
    CHECK(c.dt == doctest::Approx(2e-3));
    CHECK(c.incr(0, 0) == p.incr(0, 0) + p.incr(1, 0));
}

TEST_CASE("heat decay against the exact flow") {
    const auto c = scalar_sys(0.0, 1.0, 0.0, 0.0, 16);
    const TorusGrid& g = c->grid();
    SpectralField x(g);
    x.set_mode(0, 1, 0, cplx(0.0, -0.5));  // sin(x1), |k|^2 = 1
    SolverConfig cfg;
    cfg.dt = 1e-4;
    const double T = 0.1;
    const Control zero = Control::zero(1000, 1, cfg.dt);
    const Trajectory traj = solve_skeleton(*c, x, zero, T, cfg);
    const double got = h_norm(traj.states.back());
    const double expect = std::exp(-T) * h_norm(x);
    CHECK(std::abs(got - expect) <= 1e-3 * expect);
}

TEST_CASE("zero data and zero control stay identically zero") {
    const auto c = scalar_sys(0.0, 1.0, 0.0, 0.0, 8);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    const Control zero = Control::zero(50, 1, cfg.dt);
    const Trajectory traj = solve_skeleton(*c, SpectralField(c->grid()), zero, 0.5, cfg);
    for (const auto& s : traj.states) CHECK(h_norm(s) == 0.0);
}

TEST_CASE("linear-implicit step is unconditionally contractive for pure diffusion") {
    const auto c = scalar_sys(0.0, 1.0, 0.0, 0.0, 16);
    SpectralField x = random_field(c->grid(), {5, 1.0, 1.0, -1, false});
    for (double dt : {1e-3, 0.1, 10.0}) {
        SolverConfig cfg;
        cfg.dt = dt;
        const int steps = 10;
        const Control zero = Control::zero(steps, 1, dt);
        const Trajectory traj = solve_skeleton(*c, x, zero, steps * dt, cfg);
        for (size_t j = 1; j < traj.size(); ++j)
            CHECK(h_norm(traj.states[j]) <= h_norm(traj.states[j - 1]) * (1.0 + 1e-12));
    }
}

TEST_CASE("degeneracy lattice: the four solvers collapse at zero intensity") {
    const auto c = small_bruss();
    const SpectralField x = random_field(c->grid(), {3, 0.2, 2.0, -1, false});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = 0.0;
    const int steps = 50;
    const Control zero = Control::zero(steps, c->noise_modes(), cfg.dt);
    const NoisePath noise = NoisePath::make(9, steps, c->noise_modes(), cfg.dt);
    const DriftPerturbation no_pert = [](double, const SpectralField& u) {
        return SpectralField(u.grid());
    };

    const Trajectory skel = solve_skeleton(*c, x, zero, steps * cfg.dt, cfg);
    const Trajectory spde = solve_spde(*c, x, noise, cfg);
    const Trajectory tilt = solve_tilted(*c, x, zero, noise, cfg);
    SolverConfig cfg_eta = cfg;
    cfg_eta.eta_mode = EtaMode::custom;
    cfg_eta.eta_custom = 0.0;
    const Trajectory pert = solve_perturbed(*c, no_pert, x, noise, cfg_eta);

    CHECK(bit_identical(skel, spde));
    CHECK(bit_identical(skel, tilt));
    CHECK(bit_identical(skel, pert));
}

TEST_CASE("same-seed determinism") {
    const auto c = small_bruss();
    const SpectralField x = random_field(c->grid(), {4, 0.2, 2.0, -1, false});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = 0.1;
    const NoisePath noise = NoisePath::make(1234, 40, c->noise_modes(), cfg.dt);
    const Trajectory a = solve_spde(*c, x, noise, cfg);
    const Trajectory b = solve_spde(*c, x, noise, cfg);
    CHECK(bit_identical(a, b));
}

TEST_CASE("invariant subspace: dormant second species stays dormant") {
    // mu = 0, g = 0, u2(0) = 0 keeps u2 = 0 (the reaction has a u2^2 factor)
    BrusselatorCoefficients::Config cfg;
    cfg.a1 = {{{ScalarCoeff(1.0), ScalarCoeff(0.0)}, {ScalarCoeff(0.0), ScalarCoeff(1.0)}}};
    cfg.a2 = cfg.a1;
    cfg.b1 = {{0.5, 0.0}};
    cfg.b2 = {{0.0, 0.5}};
    cfg.g_family.kind = GKind::zero;
    cfg.lambda0 = 0.5; cfg.lambda1 = -0.2; cfg.lambda2 = 0.0;
    cfg.mu0 = 0.0; cfg.mu1 = 0.0; cfg.mu2 = 0.0;
    cfg.M = 0.4; cfg.delta = 0.4; cfg.epsilon_growth = 0.5;
    const auto c = BrusselatorCoefficients::make(grid(16, 2), cfg);
    const TorusGrid& g = c->grid();
    std::vector<double> vals(static_cast<size_t>(g.points()) * 2, 0.0);
    for (int i = 0; i < g.points(); ++i) vals[i] = 0.3 + 0.1 * std::sin(i * 0.1);
    const SpectralField x = SpectralField::from_physical(g, vals);
    SolverConfig scfg;
    scfg.dt = 1e-3;
    const int steps = 100;
    const Control zero = Control::zero(steps, 1, scfg.dt);
    const Trajectory traj = solve_skeleton(*c, x, zero, steps * scfg.dt, scfg);
    for (const auto& s : traj.states) {
        double comp2 = 0.0;
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1) comp2 = std::max(comp2, std::abs(s.at(1, i1, i2)));
        CHECK(comp2 <= 1e-14);
    }
}

TEST_CASE("states stay real through the full noisy step chain") {
    const auto c = small_bruss();
    const SpectralField x = random_field(c->grid(), {12, 0.2, 2.0, -1, false});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = 0.3;
    const NoisePath noise = NoisePath::make(77, 60, c->noise_modes(), cfg.dt);
    const Trajectory traj = solve_spde(*c, x, noise, cfg);
    for (size_t j = 0; j < traj.size(); j += 20)
        CHECK(traj.states[j].hermitian_defect() <= 1e-13);
    CHECK(traj.states.back().hermitian_defect() <= 1e-13);
}

TEST_CASE("ornstein-uhlenbeck terminal variance") {
    const double lambda = 1.0, sigma = 1.0, eps = 0.5, T = 0.5, dt = 5e-4;
    const auto c = scalar_sys(lambda, 1.0, 0.0, sigma);
    const SpectralField x(c->grid());
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.epsilon = eps;
    const int steps = static_cast<int>(T / dt);
    const long n = 10000;
    double sum = 0, sumsq = 0;
    for (long i = 0; i < n; ++i) {
        const NoisePath noise =
            NoisePath::make(777 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull, steps, 1, dt);
        const Trajectory traj = solve_spde(*c, x, noise, cfg);
        const double v = traj.states.back().mode(0, 0, 0).real();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double expect = sigma * sigma * eps * (1.0 - std::exp(-2.0 * lambda * T)) / (2.0 * lambda);
    CHECK(close_rel(var, expect, 0.05));
}

TEST_CASE("strong self-convergence under path refinement") {
    // multiplicative scalar noise: expected strong order 1/2
    const auto c = scalar_sys(0.0, 0.0, 0.8, 0.0);
    SpectralField x = SpectralField::constant(c->grid(), {1.0});
    const double T = 1.0;
    const int levels = 3;
    const long n = 200;
    std::vector<double> errs(levels, 0.0);
    for (long i = 0; i < n; ++i) {
        const uint64_t seed = 31 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull;
        const int fine_steps = 1 << 13;  // dt = T/8192
        NoisePath fine = NoisePath::make(seed, fine_steps, 1, T / fine_steps);
        for (int l = 0; l < levels; ++l) {
            const NoisePath coarse = fine.coarsen(2 << l);      // dt, 2dt, 4dt vs dt/2...
            const NoisePath refined = fine.coarsen(1 << l);     // half the step of coarse
            SolverConfig ccfg;
            ccfg.dt = coarse.dt;
            ccfg.epsilon = 0.5;
            SolverConfig rcfg;
            rcfg.dt = refined.dt;
            rcfg.epsilon = 0.5;
            const double a = solve_spde(*c, x, coarse, ccfg).states.back().mode(0, 0, 0).real();
            const double b = solve_spde(*c, x, refined, rcfg).states.back().mode(0, 0, 0).real();
            errs[l] += std::abs(a - b) / n;
        }
    }
    // observed order from successive dyadic levels
    const double order1 = std::log2(errs[1] / errs[0]);
    const double order2 = std::log2(errs[2] / errs[1]);
    CHECK(0.5 * (order1 + order2) >= 0.4);
}

TEST_CASE("tilted solve: control bound and degenerate limits") {
    const auto c = scalar_sys(1.0, 1.0, 0.0, 1.0);
    const SpectralField x(c->grid());
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = 0.1;
    const int steps = 100;
    const NoisePath noise = NoisePath::make(5, steps, 1, cfg.dt);

    Control psi = Control::zero(steps, 1, cfg.dt);
    for (int j = 0; j < steps; ++j) psi.at(j, 0) = 1.0;
    psi.refresh_cost();

    // psi = 0 equals the plain small-noise path bit-exactly
    const Control zero = Control::zero(steps, 1, cfg.dt);
    CHECK(bit_identical(solve_tilted(*c, x, zero, noise, cfg), solve_spde(*c, x, noise, cfg)));

    // eps = 0 equals the controlled deterministic path bit-exactly
    SolverConfig det = cfg;
    det.epsilon = 0.0;
    CHECK(bit_identical(solve_tilted(*c, x, psi, noise, det),
                        solve_skeleton(*c, x, psi, steps * cfg.dt, det)));

    // bound violation is a precondition error
    SolverConfig tight = cfg;
    tight.control_bound = 0.01;
    CHECK_THROWS_AS(solve_tilted(*c, x, psi, noise, tight), std::invalid_argument);
}

TEST_CASE("tilted mean matches the deterministic controlled path in the linear case") {
    const auto c = scalar_sys(1.0, 1.0, 0.0, 1.0);
    const SpectralField x(c->grid());
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = 0.2;
    const int steps = 500;
    Control psi = Control::zero(steps, 1, cfg.dt);
    for (int j = 0; j < steps; ++j) psi.at(j, 0) = std::sin(0.01 * j);
    psi.refresh_cost();
    const double ref = solve_skeleton(*c, x, psi, steps * cfg.dt, cfg)
                           .states.back().mode(0, 0, 0).real();
    const long n = 10000;
    double sum = 0, sumsq = 0;
    for (long i = 0; i < n; ++i) {
        const NoisePath noise =
            NoisePath::make(99 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull, steps, 1, cfg.dt);
        const double v = solve_tilted(*c, x, psi, noise, cfg).states.back().mode(0, 0, 0).real();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - ref) <= 3.0 * se + 1e-3 * std::abs(ref));
}

TEST_CASE("drift-corrected incompressible flow keeps the energy identity per step") {
    NavierStokesCoefficients::Config ncfg;
    ncfg.nu = 0.5;
    ncfg.b = {{0.4, 0.0}, {0.0, 0.4}};
    const auto ns = NavierStokesCoefficients::make(grid(16, 2), ncfg);
    const TorusGrid& g = ns->grid();
    std::vector<double> vals(static_cast<size_t>(g.points()) * 2);
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            const double x = i1 * g.dx(), y = i2 * g.dx();
            vals[static_cast<size_t>(i2) * g.n + i1] = 0.5 * std::sin(x) * std::cos(y);
            vals[g.coeffs_per_component() + static_cast<size_t>(i2) * g.n + i1] =
                -0.5 * std::cos(x) * std::sin(y);
        }
    const SpectralField x0 = SpectralField::from_physical(g, vals);

    struct IdentityObserver final : StepObserver {
        const NavierStokesCoefficients* ns;
        double eps;
        double worst = 0.0;
        void step(int, double, const SpectralField& u) override {
            const SpectralField a0u = ns->apply_A0(0.0, u, u);
            const SpectralField cu = ns_tilde_A(u, *ns);
            const auto b0 = ns->apply_B0(0.0, u, u);
            double hs = 0.0;
            for (const auto& e : b0) hs += h_norm(e) * h_norm(e);
            const double lhs = pair_duality(a0u, u) - eps * pair_duality(cu, u) - 0.5 * eps * hs;
            const double rhs = ns->config().nu * grad_norm_sq(u);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
        }
    } obs;
    obs.ns = ns.get();
    obs.eps = 0.25;

    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.epsilon = obs.eps;
    cfg.eta_mode = EtaMode::stratonovich;
    const NoisePath noise = NoisePath::make(2718, 100, ns->noise_modes(), cfg.dt);
    const DriftPerturbation corr = ns_strat_correction(ns);
    solve_perturbed(*ns, corr, x0, noise, cfg, &obs);
    CHECK(obs.worst <= 1e-8);
}

TEST_CASE("blow-up cap truncates and flags") {
    // negative damping: exponential growth crosses the cap
    const auto c = scalar_sys(-40.0, 0.0, 0.0, 0.0);
    const SpectralField x = SpectralField::constant(c->grid(), {1.0});
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.blowup_cap = 10.0;
    const int steps = 200;
    const Control zero = Control::zero(steps, 1, cfg.dt);
    const Trajectory traj = solve_skeleton(*c, x, zero, steps * cfg.dt, cfg);
    CHECK(traj.blown_up);
    CHECK(traj.size() < static_cast<size_t>(steps) + 1);
}

TEST_CASE("mesh refinement improves the controlled path at first order") {
    const auto c = small_bruss();
    const SpectralField x = random_field(c->grid(), {8, 0.2, 2.0, -1, false});
    const double T = 0.2;
    std::vector<double> mr;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        SolverConfig cfg;
        cfg.dt = dt;
        const int steps = static_cast<int>(std::lround(T / dt));
        const Control zero = Control::zero(steps, c->noise_modes(), dt);
        mr.push_back(mr_norm(solve_skeleton(*c, x, zero, T, cfg)));
    }
    const double d1 = std::abs(mr[0] - mr[1]);
    const double d2 = std::abs(mr[1] - mr[2]);
    CHECK(std::log2(d1 / d2) >= 0.8);
}
