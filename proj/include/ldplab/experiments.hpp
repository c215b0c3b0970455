#pragma once

#include "ldplab/rate.hpp"
#include "ldplab/systems.hpp"

#include <optional>

namespace ldplab {

/// Decreasing noise intensities with a per-level sample budget.
struct EpsilonLadder {
    std::vector<double> values;
    int samples_per_eps = 100;
    uint64_t seed_base = 1;

    static EpsilonLadder make(std::vector<double> values, int samples_per_eps, uint64_t seed_base);
};

/// Monte Carlo probability estimate; with an importance control the
/// estimator is the reweighted tilted-path average (unbiased).
struct McEstimate {
    double p_hat = 0;
    double stderr_ = 0;
    long n_hits = 0;
    long n_samples = 0;
    double eps = 0;
    bool importance_used = false;
    std::optional<Control> importance_control;
};

/// P(event | intensity eps) by n independent paths. Plain sampling without
/// `importance`; with it, paths follow the controlled equation and carry
/// the likelihood exp(-eps^{-1/2} int psi.dW - (2 eps)^{-1} int |psi|^2).
McEstimate mc_probability(const CoefficientSet& coeffs, const SpectralField& x, double eps,
                          const EventSpec& event, long n, uint64_t seed,
                          const Control* importance, const SolverConfig& cfg);

struct DecayRow {
    double eps = 0;
    double eps_log_p = 0;   ///< eps * log p_hat
    double neg_rate = 0;    ///< -(reference upper bound)
    bool degenerate = false;  ///< zero hits: excluded from the fit
    McEstimate estimate;
};

/// Decay table for the event across the ladder, importance-sampled with the
/// converged reference control. The small-noise limit is probed by the
/// linear-fit intercept of eps*log p_hat against eps (finite-eps bias is
/// first order, so the pointwise comparison is not asserted).
std::vector<DecayRow> ldp_decay_curve(const CoefficientSet& coeffs, const SpectralField& x,
                                      const EventSpec& event, const EpsilonLadder& ladder,
                                      const RateResult& rate_ref, const SolverConfig& cfg);

/// Least-squares intercept at eps = 0 over non-degenerate rows.
double decay_intercept(const std::vector<DecayRow>& rows);

struct ConvergenceRow {
    double eps = 0;
    double median = 0;
    double q90 = 0;
    int blown_up = 0;
    int n = 0;
};

/// Controlled-path distances to the deterministic controlled trajectory in
/// the MR norm, per ladder level (median and 90th percentile).
std::vector<ConvergenceRow> convergence_study(const CoefficientSet& coeffs, const SpectralField& x,
                                              const Control& psi, const EpsilonLadder& ladder,
                                              const SolverConfig& cfg);
/// Single level (eps = 0 reproduces the deterministic path exactly).
ConvergenceRow convergence_row(const CoefficientSet& coeffs, const SpectralField& x,
                               const Control& psi, double eps, int n, uint64_t seed,
                               const SolverConfig& cfg);

struct TightnessRow {
    double eps = 0;
    double gamma = 0;
    double tail = 0;  ///< empirical P(||X||_MR > gamma)
    int n = 0;
};

/// Empirical tail table over (eps, gamma); controls cycle through the
/// family (empty family = zero control). Blown-up paths count in every tail.
std::vector<TightnessRow> tightness_probe(const CoefficientSet& coeffs, const SpectralField& x,
                                          const std::vector<Control>& psi_family,
                                          const std::vector<double>& eps_values,
                                          const std::vector<double>& gamma_grid, int n,
                                          uint64_t seed, const SolverConfig& cfg);

/// Closed-form a priori bound audit for the two-species system: evaluates
/// the explicit constant chain and asserts it dominates the computed MR
/// norm. Log-scale because the chain is doubly exponential.
struct EnergyAudit {
    bool pass = false;
    double mr = 0;          ///< computed trajectory MR norm
    double log10_bound = 0;
    double log10_c1 = 0;
    double log10_c2 = 0;
};

EnergyAudit energy_bound_audit(const BrusselatorCoefficients& coeffs, const Trajectory& traj,
                               const Control& psi);

/// The bound alone as log10 (for monotonicity checks at modified |psi|).
double energy_bound_log10(const BrusselatorCoefficients& coeffs, double u01_h, double u02_h,
                          double T, double psi_l2sq);

} // namespace ldplab
