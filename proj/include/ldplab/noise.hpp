#pragma once

#include <cstdint>
#include <vector>

namespace ldplab {

// Counter-based Gaussian draws: every value is a pure function of
// (seed, step, mode, slot), so paths regenerate bit-exactly and distinct
// trajectories can run in parallel without shared RNG state.

uint64_t mix64(uint64_t x);  // splitmix64 finalizer
/// Uniform in (0,1].
double counter_uniform(uint64_t seed, uint64_t step, uint64_t mode, uint64_t slot);
/// Standard normal via Box-Muller (cosine branch).
double counter_gaussian(uint64_t seed, uint64_t step, uint64_t mode);

/// Discretized driving noise: increments[j*modes + m] ~ N(0, dt),
/// increment j taken over [j*dt, (j+1)*dt), mode m a coordinate of the
/// truncated cylindrical Brownian motion.
struct NoisePath {
    double dt = 0;
    int steps = 0;
    int modes = 0;
    uint64_t seed = 0;
    std::vector<double> increments;

    static NoisePath make(uint64_t seed, int steps, int modes, double dt);

    double incr(int step, int mode) const { return increments[static_cast<size_t>(step) * modes + mode]; }

    /// Sums consecutive groups of `factor` increments: the coarse path a
    /// refined path couples to (dt -> dt*factor).
    NoisePath coarsen(int factor) const;
};

} // namespace ldplab
