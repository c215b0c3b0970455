#pragma once

#include "ldplab/grid.hpp"
#include "ldplab/norms.hpp"
#include "ldplab/trajectory.hpp"

#include <cmath>
#include <numbers>

namespace test_util {

using namespace ldplab;

inline TorusGrid grid(int n = 8, int components = 1, double period = 2.0 * std::numbers::pi) {
    return TorusGrid::make(n, period, components);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)});
}

/// Physical-space quadrature of the squared field (independent oracle for
/// the coefficient-space pivot norm).
inline double quadrature_l2(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    double sum = 0.0;
    for (int c = 0; c < g.components; ++c) {
        const auto vals = f.to_physical(c);
        for (double v : vals) sum += v * v * g.cell_weight();
    }
    return std::sqrt(sum);
}

/// Uniform-in-time trajectory built from a closed-form mode amplitude.
template <typename AmpFn>
Trajectory analytic_trajectory(const TorusGrid& g, int k1, int k2, double T, double dt,
                               AmpFn&& amp) {
    std::vector<double> times;
    std::vector<SpectralField> states;
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int j = 0; j <= steps; ++j) {
        const double t = j * dt;
        SpectralField f(g);
        f.set_mode(0, k1, k2, cplx(0.0, -0.5 * amp(t)));  // amp * sin(k.x)
        times.push_back(t);
        states.push_back(std::move(f));
    }
    return Trajectory::make(std::move(times), std::move(states), dt);
}

} // namespace test_util
