#include "ldplab/trajectory.hpp"

#include "ldplab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

Trajectory Trajectory::make(std::vector<double> times, std::vector<SpectralField> states,
                            double dt, bool blown_up) {
    if (times.empty() || times.size() != states.size())
        throw std::domain_error("Trajectory: times/states must be nonempty and match");
    if (times.front() != 0.0)
        throw std::domain_error("Trajectory: times must start at 0");
    for (size_t j = 0; j + 1 < times.size(); ++j) {
        const double step = times[j + 1] - times[j];
        if (!(step > 0) || std::abs(step - dt) > 1e-12 * std::max(1.0, dt))
            throw std::domain_error("Trajectory: non-uniform or non-increasing times");
    }
    const TorusGrid& g = states.front().grid();
    for (const auto& s : states)
        if (!(s.grid() == g)) throw std::domain_error("Trajectory: states on mixed grids");
    Trajectory t;
    t.times = std::move(times);
    t.states = std::move(states);
    t.dt = dt;
    t.blown_up = blown_up;
    return t;
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double sum = 0.0;
    for (size_t j = 0; j + 1 < t.size(); ++j)
        sum += 0.5 * (f[j] + f[j + 1]) * (t[j + 1] - t[j]);
    return sum;
}

} // namespace

double mr_norm(const Trajectory& traj) {
    if (traj.states.empty()) throw std::domain_error("mr_norm: empty trajectory");
    double sup_h = 0.0;
    std::vector<double> vsq(traj.size());
    for (size_t j = 0; j < traj.size(); ++j) {
        sup_h = std::max(sup_h, h_norm(traj.states[j]));
        const double v = v_norm(traj.states[j]);
        vsq[j] = v * v;
    }
    return sup_h + std::sqrt(trapezoid(traj.times, vsq));
}

double mr_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mr_distance: size mismatch");
    double sup_h = 0.0;
    std::vector<double> vsq(a.size());
    for (size_t j = 0; j < a.size(); ++j) {
        SpectralField d = a.states[j] - b.states[j];
        sup_h = std::max(sup_h, h_norm(d));
        const double v = v_norm(d);
        vsq[j] = v * v;
    }
    return sup_h + std::sqrt(trapezoid(a.times, vsq));
}

double critical_space_norm(const Trajectory& traj, double beta_hat) {
    if (traj.states.empty()) throw std::domain_error("critical_space_norm: empty trajectory");
    if (!(beta_hat > 0.5) || beta_hat > 1.0)
        throw std::domain_error("critical_space_norm: beta_hat must lie in (1/2, 1]");
    const double p = 2.0 / (2.0 * beta_hat - 1.0);
    std::vector<double> f(traj.size());
    for (size_t j = 0; j < traj.size(); ++j)
        f[j] = std::pow(norm_theta(traj.states[j], beta_hat), p);
    return std::pow(trapezoid(traj.times, f), 1.0 / p);
}

double critical_interpolation_bound(const Trajectory& traj, double beta_hat) {
    if (!(beta_hat > 0.5) || beta_hat > 1.0)
        throw std::domain_error("critical_interpolation_bound: beta_hat must lie in (1/2, 1]");
    double sup_h = 0.0;
    std::vector<double> vsq(traj.size());
    for (size_t j = 0; j < traj.size(); ++j) {
        sup_h = std::max(sup_h, h_norm(traj.states[j]));
        const double v = v_norm(traj.states[j]);
        vsq[j] = v * v;
    }
    const double l2v = std::sqrt(trapezoid(traj.times, vsq));
    return std::pow(sup_h, 2.0 - 2.0 * beta_hat) * std::pow(l2v, 2.0 * beta_hat - 1.0);
}

} // namespace ldplab
