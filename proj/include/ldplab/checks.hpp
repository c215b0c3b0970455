#pragma once

#include "ldplab/systems.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace ldplab {

/// One violating sample, enough to replay it.
struct Witness {
    std::string description;
    double lhs = 0;      ///< bound side
    double rhs = 0;      ///< quantity side
    double margin = 0;   ///< lhs - rhs (negative = violation)
    uint64_t sample_index = 0;
};

/// Outcome of one structural-hypothesis check. margin >= 0 means pass;
/// it is the minimum over samples of (bound - quantity).
struct CheckReport {
    std::string name;
    enum class Verdict { pass, fail, inconclusive } verdict = Verdict::inconclusive;
    double margin = 0;
    std::vector<Witness> witnesses;  // at most 5, most violating first
    long samples = 0;
    uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> extra;  // fitted constants etc.

    bool passed() const { return verdict == Verdict::pass; }
    nlohmann::json to_json() const;
};

// ---- exact arithmetic checks ---------------------------------------------

/// Growth balance (1+rho)(2*beta-1) <= 1; margin = 1 - (1+rho)(2*beta-1).
/// rho < 0 or beta outside (1/2,1) is a domain error.
CheckReport check_subcriticality(double rho, double beta);

/// Weighted balance (1+rho_hat)(2*beta_hat-1) <= 1+2*alpha;
/// margin = 1+2*alpha - (1+rho_hat)(2*beta_hat-1). rho_hat >= 0 accepted
/// (the boundary rho_hat = 0 passes with margin 0 when beta_hat = 1).
CheckReport check_alpha_subcriticality(double rho_hat, double beta_hat, double alpha);

/// Noise smallness (1/2)|b|^2 < 1 plus C0 >= 0, C1 in [0,2];
/// margin = 1 - (1/2)|b|^2 (strict: margin 0 fails).
CheckReport check_allen_cahn_noise(double b_l2sq, double C0, double C1);

// ---- sampled operator checks ----------------------------------------------

/// Pointwise ellipticity of a - (1/2) sum_n b_n b_n^T. Tensors/vectors of
/// size 1 are uniform; otherwise one entry per grid point. Reports the
/// estimated ellipticity nu (exact 2x2 eigenvalues, plus a direction sweep
/// as cross-check); pass iff nu > 0.
CheckReport check_parabolicity(const std::vector<std::array<std::array<double, 2>, 2>>& a,
                               const std::vector<std::vector<Vec2>>& b, long samples);

/// Per-component wrapper for a two-species coefficient set; extra carries
/// nu per component.
CheckReport check_parabolicity(const BrusselatorCoefficients& coeffs, long samples);

/// Envelope inequality for the noise families:
/// (1/(4(nu_i - delta))) (sum_n |b_n||g_n(y)|)^2 + (1/2)|g_i(y)|^2 <= N_i(y)
/// with N_1 = M(1+y1^2) + (1-eps) y1^2 y2^2 and
/// N_2 = M(1 + (1+y1^2) y2^2 + |y1||y2|^3 + y1^4), sampled over the box.
CheckReport check_growth_envelope(const BrusselatorCoefficients& coeffs, long samples,
                                  double box, uint64_t seed);

struct CoercivityFitOptions {
    double m_cap = 4.0;        ///< admissible zeroth-order constant
    double phi_sq_cap = 100.0; ///< admissible inhomogeneity budget (full check)
    double n_ball = 1.0;       ///< H-ball radius for frozen states
    double t = 0.0;
};

/// Linear-part dissipation: <A0(t,u)v, v> - (1/2)||B0(t,u)v||_HS^2 >=
/// theta ||v||_V^2 - M ||v||_H^2 over sampled (u, v). Fits (theta, M) by
/// maximizing theta over M in [0, m_cap] (minimax over samples); pass iff
/// theta exceeds the cap-induced floor. extra: theta_hat, m_hat.
CheckReport check_linear_coercivity(const CoefficientSet& coeffs, long samples, uint64_t seed,
                                    const CoercivityFitOptions& opt = {});

/// Full-pair dissipation <A(t,v),v> - (1/2)||B(t,v)||_HS^2 >=
/// theta ||v||_V^2 - M ||v||_H^2 - phi^2, sampled with amplitude ladders and
/// structured same-sign directions; expected to fail for the two-species
/// reaction system (the quartic drift term), with witnesses naming the
/// dominating direction.
CheckReport check_full_coercivity(const CoefficientSet& coeffs, long samples, uint64_t seed,
                                  const CoercivityFitOptions& opt = {});

/// Empirical Lipschitz envelope for G at the configured beta: fits the
/// smallest C with ||G(u)-G(v)||_HS <= C (1 + |u|_b + |v|_b)|u-v|_b on a
/// calibration half, then validates the other half against 1.05*C.
CheckReport check_g_lipschitz(const CoefficientSet& coeffs, double beta, long samples,
                              uint64_t seed);

} // namespace ldplab
