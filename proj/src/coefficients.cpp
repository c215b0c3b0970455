#include "ldplab/coefficients.hpp"

#include "ldplab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

CriticalityParams CriticalityParams::make(std::vector<DiffusionExponents> diffusion,
                                          std::vector<DriftExponents> drift) {
    if (diffusion.empty() || diffusion.size() != drift.size())
        throw std::invalid_argument("CriticalityParams: need m >= 1 matched exponent entries");
    for (const auto& d : diffusion) {
        if (d.rho < 0) throw std::invalid_argument("CriticalityParams: rho must be >= 0");
        if (!(d.beta > 0.5 && d.beta < 1.0))
            throw std::invalid_argument("CriticalityParams: beta must lie in (1/2, 1)");
    }
    for (const auto& d : drift) {
        if (!(d.rho_hat > 0)) throw std::invalid_argument("CriticalityParams: rho_hat must be > 0");
        if (!(d.beta_hat > 0.5 && d.beta_hat <= 1.0))
            throw std::invalid_argument("CriticalityParams: beta_hat must lie in (1/2, 1]");
        if (d.alpha < 0 || d.alpha > 0.5)
            throw std::invalid_argument("CriticalityParams: alpha must lie in [0, 1/2]");
    }
    CriticalityParams p;
    p.m = static_cast<int>(diffusion.size());
    p.diffusion = std::move(diffusion);
    p.drift = std::move(drift);
    return p;
}

SpectralField apply_drift(const CoefficientSet& c, double t, const SpectralField& u,
                          bool dealias_products) {
    SpectralField out = c.apply_A0(t, u, u);
    out *= -1.0;
    for (const auto& fi : c.F_hat(t, u, dealias_products)) out += fi;
    for (const auto& fi : c.f_hat(t)) out += fi;
    return out;
}

std::vector<SpectralField> apply_diffusion(const CoefficientSet& c, double t,
                                           const SpectralField& u) {
    std::vector<SpectralField> out = c.apply_B0(t, u, u);
    const auto gn = c.G(t, u);
    if (!gn.empty()) {
        if (gn.size() != out.size())
            throw std::logic_error("apply_diffusion: G entry count mismatch");
        for (size_t n = 0; n < out.size(); ++n) out[n] += gn[n];
    }
    const auto gi = c.g_inhom(t);
    if (!gi.empty()) {
        if (gi.size() != out.size())
            throw std::logic_error("apply_diffusion: g entry count mismatch");
        for (size_t n = 0; n < out.size(); ++n) out[n] += gi[n];
    }
    return out;
}

double hilbert_schmidt_norm(const std::vector<SpectralField>& entries) {
    double sum = 0.0;
    for (const auto& e : entries) {
        const double h = h_norm(e);
        sum += h * h;
    }
    return std::sqrt(sum);
}

} // namespace ldplab
