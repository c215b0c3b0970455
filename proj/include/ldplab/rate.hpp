#pragma once

#include "ldplab/integrate.hpp"

#include <optional>
#include <string>
#include <variant>

namespace ldplab {

/// Trajectory functional with a threshold: the event holds when
/// value(trajectory) >= threshold. `mean` refers to the spatial average of
/// one component (the observable with exact scalar reductions).
struct EventSpec {
    enum class Kind {
        always_true,
        sup_mean,        ///< sup_t mean(u_comp(t))
        terminal_mean,   ///< mean(u_comp(T))
        sup_h_norm,      ///< sup_t ||u(t)||_H
        terminal_h_norm, ///< ||u(T)||_H
        terminal_component_h,  ///< ||u_comp(T)||_{L^2}
    };
    Kind kind = Kind::always_true;
    double threshold = 0.0;
    int component = 0;
    bool absolute = false;  ///< apply |.| to mean observables

    double value(const Trajectory& traj) const;
    bool holds(const Trajectory& traj) const { return value(traj) >= threshold; }
};

/// Target of a rate query: pin the terminal state in H, or demand an event.
struct TerminalTarget {
    SpectralField state;
    double tol = 1e-3;
};
struct EventTarget {
    EventSpec event;
    double tol = 1e-6;  ///< slack on (threshold - value)_+
};

enum class GradMode { finite_difference, adjoint_linear };

struct RateQuery {
    std::variant<TerminalTarget, EventTarget> target;
    double T = 0.5;
    std::vector<double> penalty_schedule = {1e2, 1e3, 1e4, 1e5, 1e6};
    int max_iters = 200;        ///< per penalty stage
    GradMode grad_mode = GradMode::finite_difference;
    double fd_step = 1e-5;
    double grad_tol = 1e-9;
};

/// Candidate value of the control-cost infimum. Always an upper bound:
/// `value` is the cost of a feasible control when converged, +infinity
/// otherwise (best iterate still returned in `control`).
struct RateResult {
    double value = std::numeric_limits<double>::infinity();
    Control control;
    double mismatch = std::numeric_limits<double>::infinity();
    bool converged = false;
    long iterations = 0;
};

/// Minimizes (1/2)int |psi|^2 subject to the query target, by penalty
/// continuation + Barzilai-Borwein gradient descent on the discretized
/// control. Never throws on non-convergence.
RateResult evaluate_rate(const CoefficientSet& coeffs, const SpectralField& x,
                         const RateQuery& query, const SolverConfig& cfg);

/// Same machinery aimed at an event functional.
RateResult rate_over_event(const CoefficientSet& coeffs, const SpectralField& x,
                           const EventSpec& event, RateQuery query, const SolverConfig& cfg);

/// Exact minimum of (1/2)int psi^2 steering u' = -lambda u + sigma psi from
/// 0 to y at time T: lambda y^2 / (sigma^2 (1 - e^{-2 lambda T})).
double lq_oracle(double lambda, double sigma, double y, double T);

} // namespace ldplab
