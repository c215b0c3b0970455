#pragma once

#include "ldplab/grid.hpp"

namespace ldplab {

/// Time-indexed sequence of fields on one grid, uniform step, t_0 = 0.
/// `blown_up` marks trajectories truncated by the solver's norm cap
/// (maximal-solution semantics: integrate until the cap, then stop).
struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    double dt = 0;
    bool blown_up = false;

    static Trajectory make(std::vector<double> times, std::vector<SpectralField> states,
                           double dt, bool blown_up = false);

    const TorusGrid& grid() const { return states.front().grid(); }
    size_t size() const { return states.size(); }
    double horizon() const { return times.back(); }
};

/// sup_t ||u(t)||_H + sqrt(int_0^T ||u(t)||_V^2 dt), trapezoid in time.
double mr_norm(const Trajectory& traj);

/// Same, for the difference of two trajectories on a common time grid.
double mr_distance(const Trajectory& a, const Trajectory& b);

/// L^p(0,T)-in-time norm of t -> ||u(t)||_{V_beta_hat} with p = 2/(2*beta_hat-1),
/// trapezoid quadrature. beta_hat must lie in (1/2, 1].
double critical_space_norm(const Trajectory& traj, double beta_hat);

/// Right-hand side of the critical interpolation bound:
/// ||u||_{L^inf H}^(2-2b) * ||u||_{L^2 V}^(2b-1).
double critical_interpolation_bound(const Trajectory& traj, double beta_hat);

} // namespace ldplab
