#pragma once

#include "ldplab/coefficients.hpp"

#include <array>
#include <functional>
#include <memory>

namespace ldplab {

/// Scalar coefficient that is either spatially constant or a sampled grid.
struct ScalarCoeff {
    double c0 = 0.0;
    std::vector<double> values;  // empty = constant c0

    ScalarCoeff() = default;
    ScalarCoeff(double c) : c0(c) {}  // NOLINT: plain constants convert implicitly
    bool constant() const { return values.empty(); }
    double at(size_t idx) const { return constant() ? c0 : values[idx]; }
    double sup_norm() const;
    double mean(size_t points) const;
};

using Tensor2 = std::array<std::array<ScalarCoeff, 2>, 2>;
using Vec2 = std::array<double, 2>;

/// Shared shape of the shipped pointwise noise families g_{n,i}(y) = c_n h_i(y).
enum class GKind {
    zero,
    bounded,    ///< h_i(y) = y_i / (1 + |y|): bounded, globally Lipschitz
    stressor,   ///< h_1(y) = y_1 y_2, h_2 = 0: critical-growth stressor
    quad_odd,   ///< h(y) = y|y| (scalar systems): quadratic growth, odd
};

struct GFamily {
    GKind kind = GKind::zero;
    std::vector<double> weights;  // c_n, one per noise mode

    double weight_sup() const;
    double weight_l2sq() const;
};

/// Pointwise reaction map (-y1*y2^2, y1*y2^2).
Vec2 brusselator_reaction(const Vec2& y);

// ---------------------------------------------------------------------------
// Two-species reaction-diffusion system with transport noise.
// ---------------------------------------------------------------------------
class BrusselatorCoefficients final : public CoefficientSet {
public:
    struct Config {
        Tensor2 a1, a2;                 ///< diffusion tensors per component
        std::vector<Vec2> b1, b2;       ///< transport directions per noise mode
        ScalarCoeff lambda0, lambda1, lambda2;
        ScalarCoeff mu0, mu1, mu2;
        GFamily g_family;
        double M = 1.0;                 ///< growth-envelope level
        double delta = 0.1;             ///< dissipation reserve, < min nu
        double epsilon_growth = 0.5;    ///< in (0, 1]
    };

    static std::shared_ptr<BrusselatorCoefficients> make(const TorusGrid& grid, Config cfg);

    std::string name() const override { return "brusselator"; }
    SpectralField apply_A0(double t, const SpectralField& u_frozen,
                           const SpectralField& v) const override;
    std::vector<SpectralField> apply_B0(double t, const SpectralField& u_frozen,
                                        const SpectralField& v) const override;
    std::vector<SpectralField> F_hat(double t, const SpectralField& u,
                                     bool dealias_products) const override;
    std::vector<SpectralField> G(double t, const SpectralField& u) const override;
    std::vector<double> implicit_symbol(double t, const SpectralField& u_frozen) const override;

    const Config& config() const { return cfg_; }
    double nu(int comp) const { return nu_[comp]; }
    /// max sup-norm over the lambda/mu coefficient fields.
    double linear_coeff_sup() const;
    /// h_i(y) of the configured family, noise weight excluded.
    Vec2 g_pointwise(const Vec2& y) const;

private:
    BrusselatorCoefficients(const TorusGrid& g, Config cfg, std::array<double, 2> nu,
                            CriticalityParams params);
    Config cfg_;
    std::array<double, 2> nu_;       // effective parabolic ellipticity per component
    std::array<bool, 2> a_constant_;
};

// ---------------------------------------------------------------------------
// Scalar double-well reaction with transport and state noise on the
// homogeneous-Dirichlet square (odd extension to the torus; states live in
// the double-sine subspace).
// ---------------------------------------------------------------------------
class AllenCahnCoefficients final : public CoefficientSet {
public:
    struct Config {
        std::vector<Vec2> b;   ///< transport directions, sum |b_n|^2 < 2
        GFamily g_family;      ///< odd families only (preserve the sine subspace)
        double C0 = 0.0;       ///< >= 0
        double C1 = 0.0;       ///< in [0, 2]; with quad_odd equals sum c_n^2
    };

    static std::shared_ptr<AllenCahnCoefficients> make(const TorusGrid& grid, Config cfg);

    std::string name() const override { return "allen_cahn"; }
    SpectralField apply_A0(double t, const SpectralField& u_frozen,
                           const SpectralField& v) const override;
    std::vector<SpectralField> apply_B0(double t, const SpectralField& u_frozen,
                                        const SpectralField& v) const override;
    std::vector<SpectralField> F_hat(double t, const SpectralField& u,
                                     bool dealias_products) const override;
    std::vector<SpectralField> G(double t, const SpectralField& u) const override;
    std::vector<double> implicit_symbol(double t, const SpectralField& u_frozen) const override;
    void project_state(SpectralField& u) const override;

    const Config& config() const { return cfg_; }
    double b_l2sq() const;

private:
    AllenCahnCoefficients(const TorusGrid& g, Config cfg, CriticalityParams params);
    Config cfg_;
};

// ---------------------------------------------------------------------------
// Incompressible 2D velocity with transport noise; drift correction operator
// available for integrating the time-symmetric noise interpretation.
// ---------------------------------------------------------------------------
class NavierStokesCoefficients final : public CoefficientSet {
public:
    struct Config {
        double nu = 1.0;            ///< viscosity > 0
        std::vector<Vec2> b;        ///< constant noise directions per mode
        double correction_weight = 0.0;  ///< folds -w*(correction) into A0
    };

    static std::shared_ptr<NavierStokesCoefficients> make(const TorusGrid& grid, Config cfg);

    std::string name() const override { return "navier_stokes"; }
    SpectralField apply_A0(double t, const SpectralField& u_frozen,
                           const SpectralField& v) const override;
    std::vector<SpectralField> apply_B0(double t, const SpectralField& u_frozen,
                                        const SpectralField& v) const override;
    std::vector<SpectralField> F_hat(double t, const SpectralField& u,
                                     bool dealias_products) const override;
    std::vector<SpectralField> G(double t, const SpectralField& u) const override {
        (void)t; (void)u; return {};
    }
    std::vector<double> implicit_symbol(double t, const SpectralField& u_frozen) const override;
    void project_state(SpectralField& u) const override;

    const Config& config() const { return cfg_; }
    /// Effective diffusion tensor (1/2) sum_n b_n b_n^T.
    const std::array<std::array<double, 2>, 2>& a_b() const { return a_b_; }

private:
    NavierStokesCoefficients(const TorusGrid& g, Config cfg, CriticalityParams params);
    Config cfg_;
    std::array<std::array<double, 2>, 2> a_b_{};
};

/// -P div(u (x) u), dealiased pseudo-spectral evaluation. Orthogonal to u.
SpectralField ns_nonlinearity(const SpectralField& u, bool dealias_products = true);

/// Drift correction P[div(a_b grad u) - (1/2) sum_n div(b_n (x) (I-P)(b_n.grad)u)].
/// For the constant directions shipped here the second term vanishes on
/// divergence-free input. Non-divergence-free input is a precondition error.
SpectralField ns_tilde_A(const SpectralField& u, const NavierStokesCoefficients& coeffs);

// ---------------------------------------------------------------------------
// Diagonal scalar toy: drift multiplier lambda + nu|kappa|^2, optional
// multiplicative noise b*u and additive noise sigma on the mean mode.
// Exact reductions (decay factors, OU variance, quadratic control cost)
// make it the oracle system for solver and rate-function validation.
// ---------------------------------------------------------------------------
class ScalarLinearCoefficients final : public CoefficientSet {
public:
    struct Config {
        double lambda = 1.0;   ///< zeroth-order drift coefficient
        double nu = 1.0;       ///< Laplacian coefficient >= 0
        double b_mult = 0.0;   ///< multiplicative noise scalar (mode 0)
        double sigma_add = 0.0;///< additive noise on the spatial mean (mode 0)
        int noise_modes = 1;
    };

    static std::shared_ptr<ScalarLinearCoefficients> make(const TorusGrid& grid, Config cfg);

    std::string name() const override { return "scalar_linear"; }
    SpectralField apply_A0(double t, const SpectralField& u_frozen,
                           const SpectralField& v) const override;
    std::vector<SpectralField> apply_B0(double t, const SpectralField& u_frozen,
                                        const SpectralField& v) const override;
    std::vector<SpectralField> F_hat(double t, const SpectralField& u,
                                     bool dealias_products) const override {
        (void)t; (void)u; (void)dealias_products; return {};
    }
    std::vector<SpectralField> G(double t, const SpectralField& u) const override {
        (void)t; (void)u; return {};
    }
    std::vector<SpectralField> g_inhom(double t) const override;
    std::vector<double> implicit_symbol(double t, const SpectralField& u_frozen) const override;
    bool linear_additive() const override { return cfg_.b_mult == 0.0; }

    const Config& config() const { return cfg_; }

private:
    ScalarLinearCoefficients(const TorusGrid& g, Config cfg, CriticalityParams params);
    Config cfg_;
};

/// Correction operator (1/2) b^2 u for the scalar multiplicative toy.
std::function<SpectralField(double, const SpectralField&)>
scalar_strat_correction(const std::shared_ptr<ScalarLinearCoefficients>& coeffs);

/// Correction operator for the incompressible system.
std::function<SpectralField(double, const SpectralField&)>
ns_strat_correction(const std::shared_ptr<NavierStokesCoefficients>& coeffs);

} // namespace ldplab
