#include "ldplab/integrate.hpp"

#include "ldplab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

Control Control::zero(int steps, int modes, double dt) {
    return make(steps, modes, dt, std::vector<double>(static_cast<size_t>(steps) * modes, 0.0));
}

Control Control::make(int steps, int modes, double dt, std::vector<double> values) {
    if (steps < 0 || modes < 1 || !(dt > 0))
        throw std::invalid_argument("Control: bad shape");
    if (values.size() != static_cast<size_t>(steps) * modes)
        throw std::invalid_argument("Control: value count mismatch");
    Control c;
    c.dt = dt;
    c.steps = steps;
    c.modes = modes;
    c.values = std::move(values);
    c.refresh_cost();
    return c;
}

double Control::recompute_cost() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return 0.5 * dt * s;
}

double Control::l2_norm() const { return std::sqrt(2.0 * cost()); }

bool Control::is_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

Trajectory integrate_core(const CoefficientSet& c, const SpectralField& x, const Control* psi,
                          const NoisePath* noise, const DriftPerturbation* tilde_A, int steps,
                          const SolverConfig& cfg, StepObserver* obs) {
    if (!(x.grid() == c.grid()))
        throw std::invalid_argument("integrate: initial state on wrong grid");
    if (psi && (psi->steps < steps || psi->modes != c.noise_modes() ||
                std::abs(psi->dt - cfg.dt) > 1e-12 * cfg.dt))
        throw std::invalid_argument("integrate: control shape does not match solver grid");
    if (noise && (noise->steps < steps || noise->modes != c.noise_modes() ||
                  std::abs(noise->dt - cfg.dt) > 1e-12 * cfg.dt))
        throw std::invalid_argument("integrate: noise path does not match solver grid");

    const double dt = cfg.dt;
    const double sqrt_eps = std::sqrt(cfg.epsilon);
    const double eta = cfg.eta();
    const size_t ncoef = c.grid().total_coeffs();

    SpectralField u = x;
    if (cfg.dealias) dealias(u);
    c.project_state(u);

    std::vector<double> times{0.0};
    std::vector<SpectralField> states{u};
    bool blown_up = false;
    if (obs) obs->step(0, 0.0, u);

    for (int j = 0; j < steps; ++j) {
        const double t = j * dt;
        const std::vector<double> sym = c.implicit_symbol(t, u);

        // explicit drift: -(A0 u - sym u) + sum F_hat + sum f_hat [+ eta*tilde_A]
        SpectralField rhs = u;
        {
            SpectralField a0u = c.apply_A0(t, u, u);
            for (size_t i = 0; i < ncoef; ++i)
                rhs.data()[i] += dt * (sym[i] * u.data()[i] - a0u.data()[i]);
        }
        for (const auto& fi : c.F_hat(t, u, cfg.dealias)) rhs.axpy(dt, fi);
        for (const auto& fi : c.f_hat(t)) rhs.axpy(dt, fi);
        if (tilde_A && eta != 0.0) {
            SpectralField pert = (*tilde_A)(t, u);
            rhs.axpy(dt * eta, pert);
        }

        // diffusion increment: sum_m B_m(u) * (psi_m dt + sqrt(eps) dW_m)
        bool any = false;
        std::vector<double> weight(static_cast<size_t>(c.noise_modes()), 0.0);
        for (int m = 0; m < c.noise_modes(); ++m) {
            double w = 0.0;
            if (psi) w += psi->at(j, m) * dt;
            if (noise) w += sqrt_eps * noise->incr(j, m);
            weight[m] = w;
            any = any || w != 0.0;
        }
        if (any) {
            const auto b = apply_diffusion(c, t, u);
            for (int m = 0; m < c.noise_modes(); ++m)
                if (weight[m] != 0.0) rhs.axpy(weight[m], b[m]);
        }

        // implicit solve per mode
        for (size_t i = 0; i < ncoef; ++i)
            rhs.data()[i] /= 1.0 + dt * sym[i];

        if (cfg.dealias) dealias(rhs);
        c.project_state(rhs);
        u = std::move(rhs);

        times.push_back((j + 1) * dt);
        states.push_back(u);
        if (obs) obs->step(j + 1, times.back(), u);

        // negated comparison also catches non-finite states
        const double hn = h_norm(u);
        if (!(hn <= cfg.blowup_cap)) {
            blown_up = true;
            break;
        }
    }
    return Trajectory::make(std::move(times), std::move(states), dt, blown_up);
}

namespace {

int step_count(double T, double dt) {
    if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("integrate: T and dt must be positive");
    const int steps = static_cast<int>(std::lround(T / dt));
    if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * T)
        throw std::invalid_argument("integrate: dt must divide the horizon");
    return steps;
}

} // namespace

Trajectory solve_skeleton(const CoefficientSet& c, const SpectralField& x, const Control& psi,
                          double T, const SolverConfig& cfg, StepObserver* obs) {
    return integrate_core(c, x, &psi, nullptr, nullptr, step_count(T, cfg.dt), cfg, obs);
}

Trajectory solve_spde(const CoefficientSet& c, const SpectralField& x, const NoisePath& noise,
                      const SolverConfig& cfg, StepObserver* obs) {
    return integrate_core(c, x, nullptr, &noise, nullptr, noise.steps, cfg, obs);
}

Trajectory solve_tilted(const CoefficientSet& c, const SpectralField& x, const Control& psi,
                        const NoisePath& noise, const SolverConfig& cfg, StepObserver* obs) {
    if (psi.l2_norm() > cfg.control_bound)
        throw std::invalid_argument("solve_tilted: control exceeds the admissible L^2 bound");
    return integrate_core(c, x, &psi, &noise, nullptr, noise.steps, cfg, obs);
}

Trajectory solve_perturbed(const CoefficientSet& c, const DriftPerturbation& tilde_A,
                           const SpectralField& x, const NoisePath& noise,
                           const SolverConfig& cfg, StepObserver* obs) {
    return integrate_core(c, x, nullptr, &noise, &tilde_A, noise.steps, cfg, obs);
}

} // namespace ldplab
