#pragma once

#include "ldplab/coefficients.hpp"
#include "ldplab/control.hpp"
#include "ldplab/noise.hpp"
#include "ldplab/trajectory.hpp"

#include <functional>
#include <optional>

namespace ldplab {

enum class EtaMode { none, stratonovich, custom };

struct SolverConfig {
    double dt = 5e-4;
    double horizon = 0.5;      ///< default T for drivers that take none explicitly
    bool dealias = true;
    double epsilon = 0.0;      ///< noise intensity, >= 0
    EtaMode eta_mode = EtaMode::none;
    double eta_custom = 0.0;   ///< used when eta_mode == custom
    double blowup_cap = 1e6;   ///< H-norm cap; exceeded => truncate and flag
    double control_bound = 100.0;  ///< admissible L^2-in-time control norm

    double eta() const {
        switch (eta_mode) {
            case EtaMode::none: return 0.0;
            case EtaMode::stratonovich: return epsilon;
            case EtaMode::custom: return eta_custom;
        }
        return 0.0;
    }
};

using DriftPerturbation = std::function<SpectralField(double, const SpectralField&)>;

/// Per-step hook; return value of `step` is ignored for the final state.
struct StepObserver {
    virtual ~StepObserver() = default;
    virtual void step(int index, double t, const SpectralField& state) = 0;
};

// One semi-implicit scheme backs all four problems: the frozen linear
// symbol is treated implicitly per mode, everything else (nonlinearities,
// inhomogeneities, control drift, perturbation drift, noise) explicitly.
// With epsilon = 0, psi = 0, eta = 0 the four entry points run the
// identical code path, so they collapse bit-exactly.

/// Deterministic controlled problem u' = -A(t,u) + B(t,u) psi(t).
Trajectory solve_skeleton(const CoefficientSet& c, const SpectralField& x, const Control& psi,
                          double T, const SolverConfig& cfg, StepObserver* obs = nullptr);

/// Small-noise problem du = -A dt + sqrt(eps) B dW.
Trajectory solve_spde(const CoefficientSet& c, const SpectralField& x, const NoisePath& noise,
                      const SolverConfig& cfg, StepObserver* obs = nullptr);

/// Controlled small-noise problem du = -A dt + B psi dt + sqrt(eps) B dW.
/// The control must satisfy the configured L^2 bound.
Trajectory solve_tilted(const CoefficientSet& c, const SpectralField& x, const Control& psi,
                        const NoisePath& noise, const SolverConfig& cfg,
                        StepObserver* obs = nullptr);

/// Adds the vanishing drift eta(eps) * tilde_A(t,u) dt; with
/// eta_mode = stratonovich this integrates the time-symmetric noise
/// interpretation in drift-corrected form.
Trajectory solve_perturbed(const CoefficientSet& c, const DriftPerturbation& tilde_A,
                           const SpectralField& x, const NoisePath& noise,
                           const SolverConfig& cfg, StepObserver* obs = nullptr);

/// Shared core; null psi/noise/tilde_A mean the corresponding term is absent.
Trajectory integrate_core(const CoefficientSet& c, const SpectralField& x, const Control* psi,
                          const NoisePath* noise, const DriftPerturbation* tilde_A, int steps,
                          const SolverConfig& cfg, StepObserver* obs);

} // namespace ldplab
