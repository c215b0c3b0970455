#include "ldplab/experiments.hpp"

#include "ldplab/norms.hpp"
#include "ldplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldplab {

EpsilonLadder EpsilonLadder::make(std::vector<double> values, int samples_per_eps,
                                  uint64_t seed_base) {
    if (values.empty()) throw std::invalid_argument("EpsilonLadder: empty");
    for (size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0)) throw std::invalid_argument("EpsilonLadder: values must be positive");
        if (i > 0 && !(values[i] < values[i - 1]))
            throw std::invalid_argument("EpsilonLadder: values must be strictly decreasing");
    }
    if (samples_per_eps < 1) throw std::invalid_argument("EpsilonLadder: samples_per_eps >= 1");
    EpsilonLadder l;
    l.values = std::move(values);
    l.samples_per_eps = samples_per_eps;
    l.seed_base = seed_base;
    return l;
}

namespace {

uint64_t path_seed(uint64_t base, long i) {
    return base + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ull;
}

int horizon_steps(const SolverConfig& cfg) {
    const int steps = static_cast<int>(std::lround(cfg.horizon / cfg.dt));
    if (steps < 1 || std::abs(steps * cfg.dt - cfg.horizon) > 1e-9 * cfg.horizon)
        throw std::invalid_argument("experiments: dt must divide the configured horizon");
    return steps;
}

} // namespace

McEstimate mc_probability(const CoefficientSet& coeffs, const SpectralField& x, double eps,
                          const EventSpec& event, long n, uint64_t seed,
                          const Control* importance, const SolverConfig& cfg) {
    if (n <= 0) throw std::domain_error("mc_probability: n must be positive");
    if (importance && importance->is_zero()) importance = nullptr;

    SolverConfig run = cfg;
    run.epsilon = eps;
    const int path_steps = importance ? importance->steps : horizon_steps(cfg);
    std::vector<double> contrib(static_cast<size_t>(n), 0.0);

    parallel_for(static_cast<size_t>(n), [&](size_t i) {
        const NoisePath noise =
            NoisePath::make(path_seed(seed, static_cast<long>(i)), path_steps,
                            coeffs.noise_modes(), cfg.dt);
        Trajectory traj = importance ? solve_tilted(coeffs, x, *importance, noise, run)
                                     : solve_spde(coeffs, x, noise, run);
        const bool hit = event.holds(traj);
        double w = 1.0;
        if (importance) {
            // likelihood over the steps the path actually took (a capped
            // path carries the stopped measure's weight)
            const int taken = static_cast<int>(traj.size()) - 1;
            double int_psi_dw = 0.0, int_psi_sq = 0.0;
            for (int j = 0; j < taken; ++j)
                for (int m = 0; m < coeffs.noise_modes(); ++m) {
                    const double p = importance->at(j, m);
                    int_psi_dw += p * noise.incr(j, m);
                    int_psi_sq += p * p * cfg.dt;
                }
            w = std::exp(-int_psi_dw / std::sqrt(eps) - int_psi_sq / (2.0 * eps));
        }
        contrib[i] = hit ? w : 0.0;
    });

    McEstimate est;
    est.eps = eps;
    est.n_samples = n;
    est.importance_used = importance != nullptr;
    if (importance) est.importance_control = *importance;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        sum += contrib[i];
        if (contrib[i] > 0.0) ++est.n_hits;
    }
    est.p_hat = sum / static_cast<double>(n);
    double var = 0.0;
    for (long i = 0; i < n; ++i) {
        const double d = contrib[i] - est.p_hat;
        var += d * d;
    }
    var /= std::max<long>(1, n - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(n));
    return est;
}

std::vector<DecayRow> ldp_decay_curve(const CoefficientSet& coeffs, const SpectralField& x,
                                      const EventSpec& event, const EpsilonLadder& ladder,
                                      const RateResult& rate_ref, const SolverConfig& cfg) {
    if (!rate_ref.converged)
        throw std::domain_error("ldp_decay_curve: reference rate result must be converged");
    std::vector<DecayRow> rows;
    for (size_t k = 0; k < ladder.values.size(); ++k) {
        const double eps = ladder.values[k];
        DecayRow row;
        row.eps = eps;
        row.neg_rate = -rate_ref.value;
        row.estimate = mc_probability(coeffs, x, eps, event, ladder.samples_per_eps,
                                      ladder.seed_base + k * 0x100000ull, &rate_ref.control, cfg);
        if (row.estimate.p_hat <= 0.0) {
            row.degenerate = true;
            row.eps_log_p = -std::numeric_limits<double>::infinity();
        } else {
            row.eps_log_p = eps * std::log(row.estimate.p_hat);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double decay_intercept(const std::vector<DecayRow>& rows) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (const auto& r : rows) {
        if (r.degenerate) continue;
        sx += r.eps;
        sy += r.eps_log_p;
        sxx += r.eps * r.eps;
        sxy += r.eps * r.eps_log_p;
        ++n;
    }
    if (n < 2) throw std::domain_error("decay_intercept: need >= 2 non-degenerate rows");
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    return (sy - slope * sx) / n;
}

ConvergenceRow convergence_row(const CoefficientSet& coeffs, const SpectralField& x,
                               const Control& psi, double eps, int n, uint64_t seed,
                               const SolverConfig& cfg) {
    SolverConfig det = cfg;
    det.epsilon = 0.0;
    const double T = psi.steps * psi.dt;
    const Trajectory ref = solve_skeleton(coeffs, x, psi, T, det);

    SolverConfig run = cfg;
    run.epsilon = eps;
    std::vector<double> dist(static_cast<size_t>(n), -1.0);
    parallel_for(static_cast<size_t>(n), [&](size_t i) {
        const NoisePath noise = NoisePath::make(path_seed(seed, static_cast<long>(i)), psi.steps,
                                                coeffs.noise_modes(), cfg.dt);
        Trajectory traj = eps == 0.0 ? solve_skeleton(coeffs, x, psi, T, det)
                                     : solve_tilted(coeffs, x, psi, noise, run);
        if (traj.blown_up || traj.size() != ref.size()) return;  // marked by dist[i] = -1
        dist[i] = mr_distance(traj, ref);
    });

    ConvergenceRow row;
    row.eps = eps;
    row.n = n;
    std::vector<double> ok;
    ok.reserve(n);
    for (double d : dist) {
        if (d < 0)
            ++row.blown_up;
        else
            ok.push_back(d);
    }
    if (ok.empty()) throw std::runtime_error("convergence_row: every path blew up");
    std::sort(ok.begin(), ok.end());
    row.median = ok[ok.size() / 2];
    row.q90 = ok[static_cast<size_t>(0.9 * (ok.size() - 1))];
    return row;
}

std::vector<ConvergenceRow> convergence_study(const CoefficientSet& coeffs, const SpectralField& x,
                                              const Control& psi, const EpsilonLadder& ladder,
                                              const SolverConfig& cfg) {
    std::vector<ConvergenceRow> rows;
    for (size_t k = 0; k < ladder.values.size(); ++k)
        rows.push_back(convergence_row(coeffs, x, psi, ladder.values[k], ladder.samples_per_eps,
                                       ladder.seed_base + k * 0x100000ull, cfg));
    return rows;
}

std::vector<TightnessRow> tightness_probe(const CoefficientSet& coeffs, const SpectralField& x,
                                          const std::vector<Control>& psi_family,
                                          const std::vector<double>& eps_values,
                                          const std::vector<double>& gamma_grid, int n,
                                          uint64_t seed, const SolverConfig& cfg) {
    if (gamma_grid.empty() || eps_values.empty())
        throw std::invalid_argument("tightness_probe: empty grid");
    std::vector<TightnessRow> rows;
    for (size_t k = 0; k < eps_values.size(); ++k) {
        const double eps = eps_values[k];
        SolverConfig run = cfg;
        run.epsilon = eps;
        std::vector<double> mr(static_cast<size_t>(n));
        parallel_for(static_cast<size_t>(n), [&](size_t i) {
            const Control* psi =
                psi_family.empty() ? nullptr : &psi_family[i % psi_family.size()];
            const int steps = psi ? psi->steps : horizon_steps(cfg);
            const NoisePath noise = NoisePath::make(
                path_seed(seed + k * 0x100000ull, static_cast<long>(i)), steps,
                coeffs.noise_modes(), cfg.dt);
            Trajectory traj = psi ? solve_tilted(coeffs, x, *psi, noise, run)
                                  : solve_spde(coeffs, x, noise, run);
            mr[i] = traj.blown_up ? std::numeric_limits<double>::infinity() : mr_norm(traj);
        });
        for (double gamma : gamma_grid) {
            TightnessRow row;
            row.eps = eps;
            row.gamma = gamma;
            row.n = n;
            long count = 0;
            for (double v : mr)
                if (v > gamma) ++count;
            row.tail = static_cast<double>(count) / static_cast<double>(n);
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

namespace {

struct BoundChain {
    double log_c1;     // first-component estimate
    double log_c2;     // second-component estimate (uses c1)
    double log_bound;  // combined MR bound
};

// The chain: c1 bounds sup|u1|^2 + int|grad u1|^2 + int|u1 u2|^2; c2 feeds
// on c1 and bounds the second component; the MR norm is then controlled by
// (1 + sqrt(1+T)) sqrt(c1 + c2). Everything in natural logs: c2 carries
// exp(2*c_km*c1) and overflows double for any nontrivial control budget.
BoundChain energy_bound_chain(const BrusselatorCoefficients& coeffs, double u01_h, double u02_h,
                              double T, double psi_l2sq) {
    const auto& cfg = coeffs.config();
    const double R = coeffs.linear_coeff_sup();
    const double M = cfg.M, delta = cfg.delta, epsg = cfg.epsilon_growth;
    const double kappa = delta / (2.0 + 2.0 * M);
    const double c_ladyzhenskaya = 2.0;  // |v|_4^4 <= C |v|_2^2 |v|_{H^1}^2
    const double c_rmk = 2.0 * R + M * (1.0 + kappa) + kappa;
    const double c_km = (1.0 + M) * c_ladyzhenskaya / (4.0 * kappa);
    const double c_de = std::max({2.0, 1.0 / delta, 1.0 / epsg});
    const double c_d = std::max(2.0, 2.0 / delta);

    BoundChain out;
    out.log_c1 = std::log(c_de) + std::log(0.5 * u01_h * u01_h + (M + R) * T) +
                 2.0 * (2.0 * R + M) * T + psi_l2sq;
    const double c1 =
        out.log_c1 > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(out.log_c1);

    double log_bracket = -std::numeric_limits<double>::infinity();
    if (u02_h > 0) log_bracket = log_sum_exp(log_bracket, std::log(0.5 * u02_h * u02_h));
    log_bracket = log_sum_exp(log_bracket, std::log(M * (1.0 + T)) + 2.0 * out.log_c1);
    if (R > 0) log_bracket = log_sum_exp(log_bracket, std::log(R * T));
    out.log_c2 = std::log(c_d) + log_bracket + 2.0 * c_rmk * T + 2.0 * c_km * c1 + psi_l2sq;

    out.log_bound = std::log(1.0 + std::sqrt(1.0 + T)) +
                    0.5 * log_sum_exp(out.log_c1, out.log_c2);
    return out;
}

double component_h_norm(const SpectralField& f, int comp) {
    const TorusGrid& g = f.grid();
    double s = 0.0;
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) s += std::norm(f.at(comp, i1, i2));
    return std::sqrt(g.volume() * s);
}

} // namespace

double energy_bound_log10(const BrusselatorCoefficients& coeffs, double u01_h, double u02_h,
                          double T, double psi_l2sq) {
    return energy_bound_chain(coeffs, u01_h, u02_h, T, psi_l2sq).log_bound / std::numbers::ln10;
}

EnergyAudit energy_bound_audit(const BrusselatorCoefficients& coeffs, const Trajectory& traj,
                               const Control& psi) {
    if (!(traj.grid() == coeffs.grid()))
        throw std::domain_error("energy_bound_audit: trajectory grid does not match coefficients");
    if (traj.grid().components != 2)
        throw std::domain_error("energy_bound_audit: two-component trajectory required");
    EnergyAudit a;
    a.mr = mr_norm(traj);
    const double u01 = component_h_norm(traj.states.front(), 0);
    const double u02 = component_h_norm(traj.states.front(), 1);
    const BoundChain chain =
        energy_bound_chain(coeffs, u01, u02, traj.horizon(), 2.0 * psi.cost());
    a.log10_bound = chain.log_bound / std::numbers::ln10;
    a.log10_c1 = chain.log_c1 / std::numbers::ln10;
    a.log10_c2 = chain.log_c2 / std::numbers::ln10;
    a.pass = a.mr <= 0.0 || std::log10(a.mr) <= a.log10_bound;
    return a;
}

} // namespace ldplab
