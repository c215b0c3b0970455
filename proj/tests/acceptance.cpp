// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include "ldplab/experiments.hpp"
#include "ldplab/norms.hpp"
#include "ldplab/parallel.hpp"
#include "ldplab/presets.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

using namespace ldplab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)});
}

PresetBundle bundle_for(const nlohmann::json& manifest) {
    return build_system(ExperimentManifest::from_json(manifest));
}

std::shared_ptr<ScalarLinearCoefficients> scalar_sys(double lambda, double nu, double b,
                                                     double sigma) {
    ScalarLinearCoefficients::Config cfg;
    cfg.lambda = lambda;
    cfg.nu = nu;
    cfg.b_mult = b;
    cfg.sigma_add = sigma;
    return ScalarLinearCoefficients::make(TorusGrid::make(4, 2.0 * std::numbers::pi, 1), cfg);
}

SpectralField divfree_random(const TorusGrid& g, uint64_t seed) {
    SpectralField f = random_field(g, {seed, 1.0, 1.2, -1, false});
    dealias(f);
    return leray_project(f);
}

} // namespace

// --------------------------------------------------------------------------

int main() {
    std::printf("acceptance suite (%s)\n", kToolVersion);

    criterion(1, "criticality arithmetic reproduces the pinned exponent triples", [](std::string& d) {
        const auto a = check_subcriticality(1.0, 0.75);
        const auto b = check_alpha_subcriticality(2.0, 5.0 / 6.0, 0.5);
        const auto c = check_alpha_subcriticality(2.0, 5.0 / 6.0, 0.0);
        d = "margins " + std::to_string(a.margin) + ", " + std::to_string(b.margin);
        return a.passed() && a.margin == 0.0 && b.passed() && std::abs(b.margin) <= 1e-15 &&
               !c.passed();
    });

    criterion(2, "interpolation estimates hold on 1000 random fields and trajectories",
              [](std::string& d) {
        const TorusGrid g = TorusGrid::make(32, 2.0 * std::numbers::pi, 1);
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 1000; ++s) {
            const SpectralField f =
                random_field(g, {static_cast<uint64_t>(s + 1), 1.0, 0.8, -1, false});
            const double theta = 0.05 + 0.9 * counter_uniform(4242, s, 0, 0);
            worst = std::max(worst, verify_interpolation(f, theta) / v_norm(f));
            if (worst > 1e-8) return false;
        }
        // single-mode equality to 1e-12
        SpectralField m(g);
        m.set_mode(0, 3, 1, cplx(0.7, -0.2));
        for (double theta : {0.1, 0.5, 0.9})
            if (std::abs(verify_interpolation(m, theta)) > 1e-12 * v_norm(m)) return false;
        // critical-lemma trajectories across the exponent grid
        for (int s = 0; s < 100; ++s) {
            std::vector<double> times;
            std::vector<SpectralField> states;
            for (int j = 0; j <= 10; ++j) {
                times.push_back(0.05 * j);
                states.push_back(random_field(
                    g, {static_cast<uint64_t>(9000 + 31 * s + j), 1.0, 0.9, -1, false}));
            }
            const Trajectory traj = Trajectory::make(times, states, 0.05);
            for (double bh : {0.6, 0.75, 5.0 / 6.0, 1.0}) {
                const double lhs = critical_space_norm(traj, bh);
                const double rhs = critical_interpolation_bound(traj, bh);
                if (lhs > rhs * (1.0 + 1e-8)) return false;
            }
        }
        d = "worst relative residual " + std::to_string(worst);
        return true;
    });

    criterion(3, "incompressible identities: cancellation and energy orthogonality",
              [](std::string& d) {
        double worst = 0.0;
        for (int n : {16, 32}) {
            const TorusGrid g = TorusGrid::make(n, 2.0 * std::numbers::pi, 2);
            NavierStokesCoefficients::Config cfg;
            cfg.nu = 0.5;
            cfg.b = {{0.7, 0.1}, {-0.2, 0.5}};
            const auto ns = NavierStokesCoefficients::make(g, cfg);
            for (int s = 0; s < 100; ++s) {
                const SpectralField u = divfree_random(g, static_cast<uint64_t>(1 + s + 1000 * n));
                // <(A0 - eps*corr)u, u> - (1/2)||sqrt(eps) B0 u||^2 = nu ||grad u||^2
                const double eps = 0.25 + 0.5 * counter_uniform(5, s, n, 0);
                const SpectralField a0u = ns->apply_A0(0.0, u, u);
                const SpectralField cu = ns_tilde_A(u, *ns);
                const auto b0 = ns->apply_B0(0.0, u, u);
                double hs = 0.0;
                for (const auto& e : b0) hs += h_norm(e) * h_norm(e);
                const double lhs =
                    pair_duality(a0u, u) - eps * pair_duality(cu, u) - 0.5 * eps * hs;
                const double rhs = cfg.nu * grad_norm_sq(u);
                const double resid = std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs));
                worst = std::max(worst, resid);
                if (resid > 1e-9) return false;
                // orthogonality of the advection term
                const double pf = std::abs(pair_duality(ns_nonlinearity(u), u));
                const double scale = std::pow(h_norm(u), 3) + 1e-300;
                worst = std::max(worst, pf / scale);
                if (pf > 1e-9 * scale) return false;
            }
        }
        d = "worst relative residual " + std::to_string(worst);
        return true;
    });

    criterion(4, "dissipation dichotomy: scalar double-well passes, two-species fails",
              [](std::string& d) {
        const PresetBundle ac = bundle_for({{"system", "allen_cahn"}});
        const PresetBundle br = bundle_for({{"system", "brusselator"}});
        const auto rac = check_full_coercivity(*ac.coeffs, 10000, 2024);
        const auto rbr = check_full_coercivity(*br.coeffs, 10000, 2024);
        bool named = false;
        for (const auto& w : rbr.witnesses)
            if (w.description.find("u1*u2^3") != std::string::npos) named = true;
        d = "theta margins " + std::to_string(rac.margin) + " / " + std::to_string(rbr.margin);
        return rac.passed() && !rbr.passed() && !rbr.witnesses.empty() && named;
    });

    criterion(5, "solver correctness: exact decay, OU variance, self-convergence",
              [](std::string& d) {
        // (a) heat decay
        const auto heat = scalar_sys(0.0, 1.0, 0.0, 0.0);
        SpectralField x0(heat->grid());
        x0.set_mode(0, 1, 0, cplx(0.0, -0.5));
        SolverConfig hcfg;
        hcfg.dt = 1e-4;
        const Control zero = Control::zero(1000, 1, hcfg.dt);
        const double got = h_norm(solve_skeleton(*heat, x0, zero, 0.1, hcfg).states.back());
        const double expect = std::exp(-0.1) * h_norm(x0);
        if (std::abs(got - expect) > 1e-3 * expect) return false;

        // (b) OU terminal variance over 1e4 paths within 5%
        const auto ousys = scalar_sys(1.0, 1.0, 0.0, 1.0);
        const SpectralField z(ousys->grid());
        SolverConfig ocfg;
        ocfg.dt = 5e-4;
        ocfg.epsilon = 0.5;
        const int steps = 1000;
        std::vector<double> vals(10000);
        parallel_for(vals.size(), [&](size_t i) {
            const NoisePath noise = NoisePath::make(
                555 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull, steps, 1, ocfg.dt);
            vals[i] = solve_spde(*ousys, z, noise, ocfg).states.back().mode(0, 0, 0).real();
        });
        double sum = 0, sumsq = 0;
        for (double v : vals) {
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / vals.size();
        const double var = sumsq / vals.size() - mean * mean;
        const double exact = 0.5 * (1.0 - std::exp(-1.0)) / 2.0;
        if (!close_rel(var, exact, 0.05)) return false;

        // (c) strong self-convergence order >= 0.4 (multiplicative noise)
        const auto mult = scalar_sys(0.0, 0.0, 0.8, 0.0);
        const SpectralField one = SpectralField::constant(mult->grid(), {1.0});
        const int levels = 3;
        std::vector<double> errs(levels, 0.0);
        const long n = 200;
        std::vector<std::array<double, 3>> per_path(n);
        parallel_for(static_cast<size_t>(n), [&](size_t i) {
            const uint64_t seed = 77 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull;
            const int fine_steps = 1 << 13;
            const NoisePath fine = NoisePath::make(seed, fine_steps, 1, 1.0 / fine_steps);
            for (int l = 0; l < levels; ++l) {
                const NoisePath coarse = fine.coarsen(2 << l);
                const NoisePath refined = fine.coarsen(1 << l);
                SolverConfig ccfg, rcfg;
                ccfg.dt = coarse.dt;
                ccfg.epsilon = 0.5;
                rcfg.dt = refined.dt;
                rcfg.epsilon = 0.5;
                const double a =
                    solve_spde(*mult, one, coarse, ccfg).states.back().mode(0, 0, 0).real();
                const double b =
                    solve_spde(*mult, one, refined, rcfg).states.back().mode(0, 0, 0).real();
                per_path[i][l] = std::abs(a - b);
            }
        });
        for (long i = 0; i < n; ++i)
            for (int l = 0; l < levels; ++l) errs[l] += per_path[i][l] / n;
        const double order = 0.5 * (std::log2(errs[1] / errs[0]) + std::log2(errs[2] / errs[1]));
        d = "variance rel err " + std::to_string(std::abs(var - exact) / exact) +
            ", strong order " + std::to_string(order);
        return order >= 0.4;
    });

    criterion(6, "drift-corrected integrator matches a midpoint integrator pathwise",
              [](std::string& d) {
        const double epsv = 0.5, b = 0.8, T = 1.0;
        const auto sys = scalar_sys(0.0, 0.0, b, 0.0);
        const SpectralField one = SpectralField::constant(sys->grid(), {1.0});
        const DriftPerturbation corr = scalar_strat_correction(sys);
        std::string parts;
        for (double dt : {1e-3, 1e-4}) {
            const int steps = static_cast<int>(std::lround(T / dt));
            const long n = 400;
            std::vector<double> diffs(n);
            parallel_for(static_cast<size_t>(n), [&](size_t i) {
                const NoisePath noise = NoisePath::make(
                    31337 + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull, steps, 1, dt);
                SolverConfig cfg;
                cfg.dt = dt;
                cfg.epsilon = epsv;
                cfg.eta_mode = EtaMode::stratonovich;
                const double ito =
                    solve_perturbed(*sys, corr, one, noise, cfg).states.back().mode(0, 0, 0).real();
                // midpoint oracle: X (1 - m/2) -> X (1 + m/2), m = sqrt(eps) b dW
                double xm = 1.0;
                for (int j = 0; j < steps; ++j) {
                    const double m = std::sqrt(epsv) * b * noise.incr(j, 0);
                    xm *= (1.0 + 0.5 * m) / (1.0 - 0.5 * m);
                }
                diffs[i] = std::abs(ito - xm);
            });
            double err = 0.0;
            for (double v : diffs) err += v / n;
            parts += " dt=" + std::to_string(dt) + ": " + std::to_string(err);
            if (err > 3.0 * std::sqrt(dt)) return false;
        }
        d = "strong errors" + parts;
        return true;
    });

    criterion(7, "steering cost within 2% of the closed form on a 3x3 grid", [](std::string& d) {
        SolverConfig cfg;
        cfg.dt = 1e-3;
        double worst = 0.0;
        for (double lambda : {0.5, 1.0, 2.0})
            for (double T : {0.5, 1.0, 2.0}) {
                const auto sys = scalar_sys(lambda, 1.0, 0.0, 1.0);
                const SpectralField z(sys->grid());
                const SpectralField target = SpectralField::constant(sys->grid(), {1.0});
                RateQuery q;
                q.target = TerminalTarget{target, 2e-3 * std::sqrt(sys->grid().volume())};
                q.T = T;
                q.grad_mode = GradMode::adjoint_linear;
                const RateResult r = evaluate_rate(*sys, z, q, cfg);
                if (!r.converged) return false;
                const double exact = lq_oracle(lambda, 1.0, 1.0, T);
                worst = std::max(worst, std::abs(r.value - exact) / exact);
                if (!close_rel(r.value, exact, 0.02)) return false;
                // feasibility replay
                SolverConfig det = cfg;
                det.epsilon = 0.0;
                const Trajectory replay = solve_skeleton(*sys, z, r.control, T, det);
                SpectralField dfield = replay.states.back() - target;
                if (h_norm(dfield) > std::get<TerminalTarget>(q.target).tol * (1.0 + 1e-9))
                    return false;
            }
        // unreachable target: infinity sentinel
        const auto dead = scalar_sys(1.0, 1.0, 0.0, 0.0);
        RateQuery q;
        q.target = TerminalTarget{SpectralField::constant(dead->grid(), {1.0}), 1e-4};
        q.T = 0.5;
        q.grad_mode = GradMode::finite_difference;
        q.max_iters = 10;
        SolverConfig dcfg;
        dcfg.dt = 1e-2;
        const RateResult r = evaluate_rate(*dead, SpectralField(dead->grid()), q, dcfg);
        d = "worst relative error " + std::to_string(worst);
        return !r.converged && std::isinf(r.value);
    });

    criterion(8, "rare-event decay intercept matches the closed-form cost within 15%",
              [](std::string& d) {
        const double gamma = 1.0, T = 0.5, dt = 5e-4;
        const auto sys = scalar_sys(1.0, 1.0, 0.0, 1.0);
        const SpectralField z(sys->grid());
        EventSpec ev;
        ev.kind = EventSpec::Kind::sup_mean;
        ev.threshold = gamma;
        RateQuery q;
        q.T = T;
        q.grad_mode = GradMode::adjoint_linear;
        q.target = EventTarget{ev, 1e-4};
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.horizon = T;
        const RateResult rate = rate_over_event(*sys, z, ev, q, cfg);
        if (!rate.converged) return false;
        const EpsilonLadder ladder = EpsilonLadder::make({0.2, 0.1, 0.05}, 10000, 909);
        const auto rows = ldp_decay_curve(*sys, z, ev, ladder, rate, cfg);
        for (const auto& r : rows)
            if (r.degenerate) return false;
        const double intercept = decay_intercept(rows);
        const double exact = lq_oracle(1.0, 1.0, gamma, T);
        d = "intercept " + std::to_string(intercept) + " vs -I = " + std::to_string(-exact);
        return std::abs(intercept - (-exact)) <= 0.15 * exact;
    });

    criterion(9, "controlled paths concentrate on the deterministic trajectory",
              [](std::string& d) {
        // two-species system at 32^2
        const PresetBundle br = bundle_for(
            {{"system", "brusselator"}, {"solver", {{"dt", 5e-4}, {"T", 0.5}}}});
        SolverConfig cfg = br.solver;
        const int steps = static_cast<int>(std::lround(cfg.horizon / cfg.dt));
        Control psi = Control::zero(steps, br.coeffs->noise_modes(), cfg.dt);
        for (int j = 0; j < steps; ++j) {
            psi.at(j, 0) = 0.4 * std::sin(2.0 * std::numbers::pi * (j + 0.5) / steps);
            psi.at(j, 4) = 0.5;
        }
        psi.refresh_cost();
        std::vector<ConvergenceRow> rows;
        for (double eps : {0.1, 0.01, 0.001})
            rows.push_back(convergence_row(*br.coeffs, br.initial, psi, eps, 200,
                                           4444 + static_cast<uint64_t>(1e3 * eps), cfg));
        for (size_t i = 0; i + 1 < rows.size(); ++i) {
            if (!(rows[i].median > rows[i + 1].median)) return false;
            if (!(rows[i].q90 > rows[i + 1].q90)) return false;
        }
        // linear system: median scaling slope 0.5 +- 0.15
        const auto lin = scalar_sys(1.0, 1.0, 0.0, 1.0);
        SolverConfig lcfg;
        lcfg.dt = 1e-3;
        Control lpsi = Control::zero(500, 1, lcfg.dt);
        for (int j = 0; j < 500; ++j) lpsi.at(j, 0) = 0.5;
        lpsi.refresh_cost();
        std::vector<ConvergenceRow> lrows;
        for (double eps : {0.1, 0.01, 0.001})
            lrows.push_back(convergence_row(*lin, SpectralField(lin->grid()), lpsi, eps, 200,
                                            31 + static_cast<uint64_t>(1e3 * eps), lcfg));
        const double slope =
            std::log(lrows[0].median / lrows[2].median) / std::log(0.1 / 0.001);
        d = "two-species medians " + std::to_string(rows[0].median) + " > " +
            std::to_string(rows[1].median) + " > " + std::to_string(rows[2].median) +
            "; linear slope " + std::to_string(slope);
        return slope >= 0.35 && slope <= 0.65;
    });

    criterion(10, "explicit a priori constants dominate the computed norms", [](std::string& d) {
        const PresetBundle br = bundle_for(
            {{"system", "brusselator"}, {"solver", {{"dt", 5e-4}, {"T", 0.5}}}});
        const auto bruss = std::static_pointer_cast<BrusselatorCoefficients>(br.coeffs);
        SolverConfig cfg = br.solver;
        const int steps = static_cast<int>(std::lround(cfg.horizon / cfg.dt));
        double worst_gap = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 20; ++s) {
            const SpectralField x0 =
                random_field(br.coeffs->grid(), {static_cast<uint64_t>(100 + s), 0.15, 2.0, -1, false});
            Control psi = Control::zero(steps, br.coeffs->noise_modes(), cfg.dt);
            for (int j = 0; j < steps; ++j)
                for (int m = 0; m < psi.modes; ++m)
                    psi.at(j, m) = 0.2 * counter_gaussian(900 + s, j, m);
            psi.refresh_cost();
            if (psi.l2_norm() > 1.0) {
                const double scale = 1.0 / psi.l2_norm();
                for (auto& v : psi.values) v *= scale;
                psi.refresh_cost();
            }
            const Trajectory traj = solve_skeleton(*bruss, x0, psi, cfg.horizon, cfg);
            const EnergyAudit audit = energy_bound_audit(*bruss, traj, psi);
            if (!audit.pass) return false;
            worst_gap = std::min(worst_gap,
                                 audit.log10_bound - std::log10(std::max(audit.mr, 1e-300)));
            // monotonicity in the control budget by recomputation
            const double u01 = 0.2, u02 = 0.2;
            const double b1 = energy_bound_log10(*bruss, u01, u02, cfg.horizon,
                                                 2.0 * psi.cost());
            const double b2 = energy_bound_log10(*bruss, u01, u02, cfg.horizon,
                                                 8.0 * psi.cost());
            if (b2 < b1) return false;
        }
        d = "smallest log10 headroom " + std::to_string(worst_gap);
        return true;
    });

    criterion(11, "manifest replay is byte-identical and witnesses replay", [](std::string& d) {
        nlohmann::json j = {{"system", "ou_scalar"},
                            {"solver", {{"dt", 1e-2}, {"T", 0.2}, {"epsilon", 0.1}}},
                            {"mc", {{"n", 200}}},
                            {"event", {{"kind", "terminal_mean"}, {"threshold", 0.05}}},
                            {"tasks", {"checks", "skeleton", "simulate", "mc"}}};
        const ExperimentManifest m = ExperimentManifest::from_json(j);
        const fs::path base = fs::temp_directory_path() / "ldplab_acceptance";
        fs::remove_all(base);
        const fs::path o1 = base / "a", o2 = base / "b";
        if (run_manifest(m, o1.string()) != 0) return false;
        if (run_manifest(m, o2.string()) != 0) return false;
        for (const auto& e : fs::directory_iterator(o1)) {
            const std::string name = e.path().filename().string();
            if (name == "run.log") continue;
            if (read_text_file(e.path().string()) !=
                read_text_file((o2 / name).string()))
                return false;
        }
        // witnesses replay bit-exactly under the recorded seed
        const PresetBundle br = bundle_for({{"system", "brusselator"}});
        const auto r1 = check_full_coercivity(*br.coeffs, 10000, 2024);
        const auto r2 = check_full_coercivity(*br.coeffs, 10000, 2024);
        if (r1.passed() || r1.witnesses.size() != r2.witnesses.size()) return false;
        for (size_t i = 0; i < r1.witnesses.size(); ++i)
            if (r1.witnesses[i].lhs != r2.witnesses[i].lhs ||
                r1.witnesses[i].margin != r2.witnesses[i].margin)
                return false;
        fs::remove_all(base);
        d = "artifacts byte-identical; " + std::to_string(r1.witnesses.size()) +
            " witnesses replayed";
        return true;
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
