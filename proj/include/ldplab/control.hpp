#pragma once

#include <cstdint>
#include <vector>

namespace ldplab {

/// Piecewise-constant truncated l^2-valued control path psi on the solver
/// grid; values[j*modes + m] holds psi^m on [j*dt, (j+1)*dt). The quadratic
/// cost (1/2) sum_j dt |psi_j|^2 is cached at construction.
struct Control {
    double dt = 0;
    int steps = 0;
    int modes = 0;
    std::vector<double> values;
    double cached_cost = 0;

    static Control zero(int steps, int modes, double dt);
    static Control make(int steps, int modes, double dt, std::vector<double> values);

    double at(int step, int mode) const { return values[static_cast<size_t>(step) * modes + mode]; }
    double& at(int step, int mode) { return values[static_cast<size_t>(step) * modes + mode]; }

    double cost() const { return cached_cost; }
    double recompute_cost() const;
    void refresh_cost() { cached_cost = recompute_cost(); }
    /// sqrt(2*cost): the L^2(0,T; l^2) norm of the path.
    double l2_norm() const;
    bool is_zero() const;
};

} // namespace ldplab
