#include "ldplab/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldplab {

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double counter_uniform(uint64_t seed, uint64_t step, uint64_t mode, uint64_t slot) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ step);
    h = mix64(h ^ (mode * 0x9e3779b97f4a7c15ull));
    h = mix64(h ^ (slot * 0xda942042e4dd58b5ull));
    // top 53 bits -> (0,1]
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

double counter_gaussian(uint64_t seed, uint64_t step, uint64_t mode) {
    const double u1 = counter_uniform(seed, step, mode, 0);
    const double u2 = counter_uniform(seed, step, mode, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath NoisePath::make(uint64_t seed, int steps, int modes, double dt) {
    if (steps < 0 || modes < 0 || !(dt > 0))
        throw std::invalid_argument("NoisePath: steps, modes >= 0 and dt > 0 required");
    NoisePath p;
    p.dt = dt;
    p.steps = steps;
    p.modes = modes;
    p.seed = seed;
    p.increments.resize(static_cast<size_t>(steps) * modes);
    const double s = std::sqrt(dt);
    for (int j = 0; j < steps; ++j)
        for (int m = 0; m < modes; ++m)
            p.increments[static_cast<size_t>(j) * modes + m] =
                s * counter_gaussian(seed, static_cast<uint64_t>(j), static_cast<uint64_t>(m));
    return p;
}

NoisePath NoisePath::coarsen(int factor) const {
    if (factor < 1 || steps % factor != 0)
        throw std::invalid_argument("NoisePath::coarsen: factor must divide steps");
    NoisePath p;
    p.dt = dt * factor;
    p.steps = steps / factor;
    p.modes = modes;
    p.seed = seed;
    p.increments.assign(static_cast<size_t>(p.steps) * modes, 0.0);
    for (int j = 0; j < steps; ++j)
        for (int m = 0; m < modes; ++m)
            p.increments[static_cast<size_t>(j / factor) * modes + m] += incr(j, m);
    return p;
}

} // namespace ldplab
