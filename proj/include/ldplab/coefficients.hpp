#pragma once

#include "ldplab/grid.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ldplab {

/// Exponent triple governing one nonlinear drift index: the growth balance
/// (1+rho_hat)(2*beta_hat-1) <= 1+2*alpha.
struct DriftExponents {
    double rho_hat;   ///< > 0
    double beta_hat;  ///< in (1/2, 1]
    double alpha;     ///< in [0, 1/2]
};

/// Exponent pair for one diffusion nonlinearity index: (1+rho)(2*beta-1) <= 1.
struct DiffusionExponents {
    double rho;   ///< >= 0
    double beta;  ///< in (1/2, 1)
};

/// Criticality exponents of a coefficient set; m indices shared between the
/// drift and diffusion nonlinearities. Constructor-validated ranges.
struct CriticalityParams {
    int m = 1;
    std::vector<DiffusionExponents> diffusion;  // size m
    std::vector<DriftExponents> drift;          // size m

    static CriticalityParams make(std::vector<DiffusionExponents> diffusion,
                                  std::vector<DriftExponents> drift);
};

/// Abstract coefficient sextuple (A0, B0, F_hat, G, f_hat, g):
///   drift      -A(t,u) = -A0(t,u)u + sum_i F_hat_i(t,u) + sum_i f_hat_i(t)
///   diffusion   B(t,u) = B0(t,u)u + G(t,u) + g(t)   (one entry per noise mode)
/// A0/B0 are linear in their final argument; implementations are immutable
/// and all apply_* methods are pure.
class CoefficientSet {
public:
    virtual ~CoefficientSet() = default;

    const TorusGrid& grid() const { return grid_; }
    int noise_modes() const { return noise_modes_; }
    const CriticalityParams& params() const { return params_; }
    virtual std::string name() const = 0;

    /// A0(t, u_frozen) applied to v (value in the dual scale).
    virtual SpectralField apply_A0(double t, const SpectralField& u_frozen,
                                   const SpectralField& v) const = 0;
    /// Per-noise-mode B0(t, u_frozen) applied to v; noise_modes() entries.
    virtual std::vector<SpectralField> apply_B0(double t, const SpectralField& u_frozen,
                                                const SpectralField& v) const = 0;
    /// Nonlinear drift terms, one per index i (params().m entries).
    /// `dealias_products` controls the 2/3 mask on pseudo-spectral products;
    /// checkers turn it off to pair grid-exact values.
    virtual std::vector<SpectralField> F_hat(double t, const SpectralField& u,
                                             bool dealias_products = true) const = 0;
    /// Nonlinear diffusion terms per noise mode.
    virtual std::vector<SpectralField> G(double t, const SpectralField& u) const = 0;
    /// Drift inhomogeneities per index (empty = zero).
    virtual std::vector<SpectralField> f_hat(double t) const { (void)t; return {}; }
    /// Diffusion inhomogeneities per noise mode (empty = zero).
    virtual std::vector<SpectralField> g_inhom(double t) const { (void)t; return {}; }

    /// Per component-mode symbol of the implicitly treated (frozen) linear
    /// part, laid out like SpectralField data. Nonnegative.
    virtual std::vector<double> implicit_symbol(double t, const SpectralField& u_frozen) const = 0;

    /// Structural projection applied to solver states after each step
    /// (divergence-free for velocities, double-odd for the Dirichlet square).
    virtual void project_state(SpectralField& u) const { (void)u; }

    /// True when the drift is a fixed symbol and B is state-independent;
    /// enables the exact discrete adjoint in the rate evaluator.
    virtual bool linear_additive() const { return false; }

protected:
    CoefficientSet(TorusGrid grid, int noise_modes, CriticalityParams params)
        : grid_(grid), noise_modes_(noise_modes), params_(std::move(params)) {}

    TorusGrid grid_;
    int noise_modes_;
    CriticalityParams params_;
};

/// -A(t,u) assembled in spectral space: -A0(t,u)u + sum F_hat_i + sum f_hat_i.
SpectralField apply_drift(const CoefficientSet& c, double t, const SpectralField& u,
                          bool dealias_products = true);

/// B(t,u) per noise mode: B0(t,u)u + G_i(t,u) + g_i(t).
std::vector<SpectralField> apply_diffusion(const CoefficientSet& c, double t,
                                           const SpectralField& u);

/// sqrt(sum_n ||entry_n||_H^2): Hilbert-Schmidt norm of a diffusion value.
double hilbert_schmidt_norm(const std::vector<SpectralField>& entries);

} // namespace ldplab
