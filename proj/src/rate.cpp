#include "ldplab/rate.hpp"

#include "ldplab/norms.hpp"
#include "ldplab/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

double EventSpec::value(const Trajectory& traj) const {
    auto mean_of = [&](const SpectralField& f) {
        double m = f.mode(component, 0, 0).real();
        return absolute ? std::abs(m) : m;
    };
    switch (kind) {
        case Kind::always_true:
            return threshold;  // holds by construction
        case Kind::sup_mean: {
            if (traj.blown_up) return std::numeric_limits<double>::infinity();
            double v = -std::numeric_limits<double>::infinity();
            for (const auto& s : traj.states) v = std::max(v, mean_of(s));
            return v;
        }
        case Kind::terminal_mean:
            return mean_of(traj.states.back());
        case Kind::sup_h_norm: {
            if (traj.blown_up) return std::numeric_limits<double>::infinity();
            double v = 0.0;
            for (const auto& s : traj.states) v = std::max(v, h_norm(s));
            return v;
        }
        case Kind::terminal_h_norm:
            return h_norm(traj.states.back());
        case Kind::terminal_component_h: {
            const auto& f = traj.states.back();
            const TorusGrid& g = f.grid();
            double sum = 0.0;
            for (int i2 = 0; i2 < g.n; ++i2)
                for (int i1 = 0; i1 < g.n; ++i1) sum += std::norm(f.at(component, i1, i2));
            return std::sqrt(g.volume() * sum);
        }
    }
    return 0.0;
}

double lq_oracle(double lambda, double sigma, double y, double T) {
    if (!(T > 0)) throw std::domain_error("lq_oracle: T must be positive");
    if (!(lambda > 0)) throw std::domain_error("lq_oracle: lambda must be positive");
    if (sigma == 0.0) throw std::domain_error("lq_oracle: sigma must be nonzero");
    return lambda * y * y / (sigma * sigma * (1.0 - std::exp(-2.0 * lambda * T)));
}

namespace {

struct Objective {
    const CoefficientSet& coeffs;
    const SpectralField& x;
    const RateQuery& query;
    SolverConfig cfg;  // epsilon forced to 0: the controlled deterministic path
    int steps;

    struct Eval {
        double cost = 0;
        double mismatch = 0;
        double total = 0;
        Trajectory traj;
    };

    Eval operator()(const Control& psi, double penalty) const {
        Eval e;
        e.traj = integrate_core(coeffs, x, &psi, nullptr, nullptr, steps, cfg, nullptr);
        e.cost = psi.cost();
        e.mismatch = mismatch_of(e.traj);
        e.total = e.cost + penalty * e.mismatch * e.mismatch;
        return e;
    }

    double mismatch_of(const Trajectory& traj) const {
        if (std::holds_alternative<TerminalTarget>(query.target)) {
            const auto& t = std::get<TerminalTarget>(query.target);
            SpectralField d = traj.states.back() - t.state;
            return h_norm(d);
        }
        const auto& t = std::get<EventTarget>(query.target);
        return std::max(0.0, t.event.threshold - t.event.value(traj));
    }

    double tol() const {
        if (std::holds_alternative<TerminalTarget>(query.target))
            return std::get<TerminalTarget>(query.target).tol;
        return std::get<EventTarget>(query.target).tol;
    }
};

// Exact gradient of cost + penalty*mismatch^2 through the discrete scheme,
// valid when the drift is a fixed symbol and B is state-independent.
std::vector<double> adjoint_gradient(const Objective& obj, const Control& psi, double penalty,
                                     const Objective::Eval& e) {
    const CoefficientSet& c = obj.coeffs;
    const TorusGrid& g = c.grid();
    const int steps = obj.steps;
    const double dt = obj.cfg.dt;
    const size_t ncoef = g.total_coeffs();

    // terminal adjoint state
    SpectralField q(g);
    int anchor = steps;  // backward start index
    if (std::holds_alternative<TerminalTarget>(obj.query.target)) {
        const auto& t = std::get<TerminalTarget>(obj.query.target);
        q = e.traj.states.back() - t.state;
        const double m = e.mismatch;
        // d(pen*m^2)/du_T paired via pair_duality: 2*pen*(u_T - target)
        if (m > 0.0) q *= 2.0 * penalty;
    } else {
        const auto& t = std::get<EventTarget>(obj.query.target);
        const double gap = e.mismatch;
        if (gap > 0.0) {
            if (t.event.kind == EventSpec::Kind::terminal_mean) {
                anchor = steps;
            } else if (t.event.kind == EventSpec::Kind::sup_mean) {
                // ties resolve to the latest time so a flat start still
                // exposes the whole control horizon to the subgradient
                double best = -std::numeric_limits<double>::infinity();
                for (size_t j = 0; j < e.traj.size(); ++j) {
                    const double v = e.traj.states[j].mode(t.event.component, 0, 0).real();
                    const double vv = t.event.absolute ? std::abs(v) : v;
                    if (vv >= best) {
                        best = vv;
                        anchor = static_cast<int>(j);
                    }
                }
            } else {
                throw std::invalid_argument("adjoint gradient supports terminal/sup mean events only");
            }
            double sign = 1.0;
            if (std::holds_alternative<EventTarget>(obj.query.target) && t.event.absolute) {
                const double v = e.traj.states[anchor].mode(t.event.component, 0, 0).real();
                sign = v < 0 ? -1.0 : 1.0;
            }
            // mismatch = gap = threshold - value; d(pen*gap^2)/d(mean) = -2*pen*gap*sign
            q.set_mode(t.event.component, 0, 0,
                       cplx(-2.0 * penalty * gap * sign / g.volume(), 0.0));
        }
    }

    std::vector<double> grad(psi.values.size(), 0.0);
    for (size_t i = 0; i < grad.size(); ++i) grad[i] = dt * psi.values[i];

    // backward sweep; additive noise operators are state-independent
    const auto bfields = apply_diffusion(c, 0.0, SpectralField(g));
    for (int j = anchor - 1; j >= 0; --j) {
        const double t = j * dt;
        const std::vector<double> sym = c.implicit_symbol(t, e.traj.states[j]);
        // q <- D_j q (D diagonal, self-adjoint)
        for (size_t i = 0; i < ncoef; ++i) q.data()[i] /= 1.0 + dt * sym[i];
        for (int m = 0; m < c.noise_modes(); ++m)
            grad[static_cast<size_t>(j) * c.noise_modes() + m] += dt * pair_duality(q, bfields[m]);
        // propagate through the explicit drift of the linear symbol:
        // u_{j+1} = D(u_j + dt*(sym u_j - A0 u_j) + ...) and A0 u = sym u for
        // diagonal sets, so the state Jacobian is exactly D.
    }
    return grad;
}

std::vector<double> fd_gradient(const Objective& obj, const Control& psi, double penalty,
                                double base_total, double h) {
    std::vector<double> grad(psi.values.size(), 0.0);
    parallel_for(psi.values.size(), [&](size_t i) {
        Control p = psi;
        const double step = h * (1.0 + std::abs(p.values[i]));
        p.values[i] += step;
        p.refresh_cost();
        const auto e = obj(p, penalty);
        grad[i] = (e.total - base_total) / step;
    });
    return grad;
}

} // namespace

RateResult evaluate_rate(const CoefficientSet& coeffs, const SpectralField& x,
                         const RateQuery& query, const SolverConfig& cfg) {
    for (size_t i = 0; i + 1 < query.penalty_schedule.size(); ++i)
        if (!(query.penalty_schedule[i + 1] > query.penalty_schedule[i]))
            throw std::invalid_argument("evaluate_rate: penalty schedule must increase");

    SolverConfig det = cfg;
    det.epsilon = 0.0;
    det.eta_mode = EtaMode::none;
    const int steps = static_cast<int>(std::lround(query.T / det.dt));
    if (steps < 1 || std::abs(steps * det.dt - query.T) > 1e-9 * query.T)
        throw std::invalid_argument("evaluate_rate: dt must divide T");

    Objective obj{coeffs, x, query, det, steps};
    const double tol = obj.tol();

    Control psi = Control::zero(steps, coeffs.noise_modes(), det.dt);
    RateResult result;
    result.control = psi;

    auto consider = [&](const Control& p, const Objective::Eval& e) {
        if (e.mismatch <= tol && e.cost < result.value) {
            result.value = e.cost;
            result.control = p;
            result.mismatch = e.mismatch;
            result.converged = true;
        }
        if (!result.converged && e.mismatch < result.mismatch) {
            result.mismatch = e.mismatch;
            result.control = p;
        }
    };

    auto grad_of = [&](const Control& p, double pen, const Objective::Eval& e) {
        if (query.grad_mode == GradMode::adjoint_linear) {
            if (!coeffs.linear_additive())
                throw std::invalid_argument(
                    "evaluate_rate: adjoint gradient requires a linear-additive system");
            return adjoint_gradient(obj, p, pen, e);
        }
        return fd_gradient(obj, p, pen, e.total, query.fd_step);
    };

    long iters = 0;
    for (double pen : query.penalty_schedule) {
        auto e = obj(psi, pen);
        consider(psi, e);
        std::vector<double> grad = grad_of(psi, pen, e);
        std::vector<double> prev_psi, prev_grad;
        for (int it = 0; it < query.max_iters; ++it) {
            double gnorm = 0.0;
            for (double gv : grad) gnorm += gv * gv;
            gnorm = std::sqrt(gnorm);
            if (gnorm <= query.grad_tol * (1.0 + pen)) break;

            double step;
            if (prev_psi.empty()) {
                step = 1e-2 / (1.0 + gnorm);
            } else {
                double ss = 0.0, sy = 0.0;
                for (size_t i = 0; i < grad.size(); ++i) {
                    const double s = psi.values[i] - prev_psi[i];
                    const double yv = grad[i] - prev_grad[i];
                    ss += s * s;
                    sy += s * yv;
                }
                step = sy > 1e-300 ? ss / sy : 1e-2 / (1.0 + gnorm);
                step = std::clamp(step, 1e-12, 1e6);
            }

            prev_psi = psi.values;
            prev_grad = grad;
            for (size_t i = 0; i < grad.size(); ++i) psi.values[i] -= step * grad[i];
            psi.refresh_cost();
            e = obj(psi, pen);
            consider(psi, e);
            grad = grad_of(psi, pen, e);
            ++iters;
        }
    }
    result.iterations = iters;
    if (!result.converged) result.value = std::numeric_limits<double>::infinity();
    return result;
}

RateResult rate_over_event(const CoefficientSet& coeffs, const SpectralField& x,
                           const EventSpec& event, RateQuery query, const SolverConfig& cfg) {
    query.target = EventTarget{event, std::holds_alternative<EventTarget>(query.target)
                                          ? std::get<EventTarget>(query.target).tol
                                          : 1e-6};
    return evaluate_rate(coeffs, x, query, cfg);
}

} // namespace ldplab
