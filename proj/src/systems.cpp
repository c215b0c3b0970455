#include "ldplab/systems.hpp"

#include "ldplab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

double ScalarCoeff::sup_norm() const {
    if (constant()) return std::abs(c0);
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double ScalarCoeff::mean(size_t points) const {
    if (constant()) return c0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(points);
}

double GFamily::weight_sup() const {
    double s = 0.0;
    for (double w : weights) s = std::max(s, std::abs(w));
    return s;
}

double GFamily::weight_l2sq() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
}

Vec2 brusselator_reaction(const Vec2& y) {
    const double r = y[0] * y[1] * y[1];
    return {-r, r};
}

namespace {

// min eigenvalue of the symmetric part of a 2x2 matrix
double min_eig_sym(double a11, double a12, double a21, double a22) {
    const double s = 0.5 * (a12 + a21);
    const double tr = a11 + a22;
    const double det = a11 * a22 - s * s;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return 0.5 * tr - disc;
}

double effective_ellipticity(const Tensor2& a, const std::vector<Vec2>& b, size_t points) {
    // (1/2) sum_n b_n b_n^T is constant here; scan the a-grid
    double q11 = 0, q12 = 0, q22 = 0;
    for (const auto& bn : b) {
        q11 += 0.5 * bn[0] * bn[0];
        q12 += 0.5 * bn[0] * bn[1];
        q22 += 0.5 * bn[1] * bn[1];
    }
    double worst = std::numeric_limits<double>::infinity();
    const bool all_const = a[0][0].constant() && a[0][1].constant() &&
                           a[1][0].constant() && a[1][1].constant();
    const size_t scan = all_const ? 1 : points;
    for (size_t p = 0; p < scan; ++p)
        worst = std::min(worst, min_eig_sym(a[0][0].at(p) - q11, a[0][1].at(p) - q12,
                                            a[1][0].at(p) - q12, a[1][1].at(p) - q22));
    return worst;
}

bool tensor_constant(const Tensor2& a) {
    return a[0][0].constant() && a[0][1].constant() && a[1][0].constant() && a[1][1].constant();
}

void check_scalar_bounded(const ScalarCoeff& c, const char* what) {
    const double s = c.sup_norm();
    if (!std::isfinite(s)) throw std::invalid_argument(std::string(what) + ": unbounded field");
}

// w = -div(a grad v_c) for one component, grid-varying tensor.
void apply_divergence_form(const TorusGrid& g, const Tensor2& a, const SpectralField& v,
                           int comp, SpectralField& out) {
    SpectralField d0 = derivative(v, 0), d1 = derivative(v, 1);
    std::vector<double> p0 = d0.to_physical(comp), p1 = d1.to_physical(comp);
    std::vector<double> w0(p0.size()), w1(p0.size());
    for (size_t i = 0; i < p0.size(); ++i) {
        w0[i] = a[0][0].at(i) * p0[i] + a[0][1].at(i) * p1[i];
        w1[i] = a[1][0].at(i) * p0[i] + a[1][1].at(i) * p1[i];
    }
    TorusGrid sg = g;
    sg.components = 1;
    SpectralField f0 = SpectralField::from_physical(sg, w0);
    SpectralField f1 = SpectralField::from_physical(sg, w1);
    const int nyq = g.n / 2;
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
            cplx d(0.0, 0.0);
            if (i1 != nyq) d += cplx(0.0, g.kappa(i1)) * f0.at(0, i1, i2);
            if (i2 != nyq) d += cplx(0.0, g.kappa(i2)) * f1.at(0, i1, i2);
            out.at(comp, i1, i2) = -d;
        }
}

} // namespace

// ---------------------------------------------------------------------------
// BrusselatorCoefficients
// ---------------------------------------------------------------------------

BrusselatorCoefficients::BrusselatorCoefficients(const TorusGrid& g, Config cfg,
                                                 std::array<double, 2> nu,
                                                 CriticalityParams params)
    : CoefficientSet(g, static_cast<int>(cfg.b1.size()), std::move(params)),
      cfg_(std::move(cfg)), nu_(nu) {
    a_constant_ = {tensor_constant(cfg_.a1), tensor_constant(cfg_.a2)};
}

std::shared_ptr<BrusselatorCoefficients> BrusselatorCoefficients::make(const TorusGrid& grid,
                                                                       Config cfg) {
    if (grid.components != 2)
        throw std::invalid_argument("brusselator: 2-component grid required");
    if (cfg.b1.size() != cfg.b2.size())
        throw std::invalid_argument("brusselator: b1/b2 mode counts differ");
    if (!cfg.g_family.weights.empty() && cfg.g_family.weights.size() != cfg.b1.size())
        throw std::invalid_argument("brusselator: g weights must match noise mode count");
    for (const auto* t : {&cfg.a1, &cfg.a2})
        for (const auto& row : *t)
            for (const auto& e : row) check_scalar_bounded(e, "brusselator a");
    for (const auto* c : {&cfg.lambda0, &cfg.lambda1, &cfg.lambda2, &cfg.mu0, &cfg.mu1, &cfg.mu2})
        check_scalar_bounded(*c, "brusselator lambda/mu");
    if (!(cfg.epsilon_growth > 0.0 && cfg.epsilon_growth <= 1.0))
        throw std::invalid_argument("brusselator: epsilon_growth must lie in (0,1]");
    if (!(cfg.delta > 0) || !(cfg.M > 0))
        throw std::invalid_argument("brusselator: delta and M must be positive");

    const size_t pts = static_cast<size_t>(grid.points());
    const std::array<double, 2> nu = {effective_ellipticity(cfg.a1, cfg.b1, pts),
                                      effective_ellipticity(cfg.a2, cfg.b2, pts)};
    if (!(nu[0] > 0 && nu[1] > 0))
        throw std::invalid_argument("brusselator: effective diffusion tensor not elliptic");
    if (!(cfg.delta < std::min(nu[0], nu[1])))
        throw std::invalid_argument("brusselator: delta must stay below min ellipticity");

    // exponents: reaction index is critical at (2, 5/6, 1/2); the linear
    // drift index and the noise nonlinearity sit at (1, 3/4).
    auto params = CriticalityParams::make(
        {{1.0, 0.75}, {1.0, 0.75}},
        {{1.0, 0.75, 0.0}, {2.0, 5.0 / 6.0, 0.5}});
    return std::shared_ptr<BrusselatorCoefficients>(
        new BrusselatorCoefficients(grid, std::move(cfg), nu, std::move(params)));
}

std::vector<double> BrusselatorCoefficients::implicit_symbol(double, const SpectralField&) const {
    std::vector<double> sym(grid_.total_coeffs(), 0.0);
    const size_t pts = static_cast<size_t>(grid_.points());
    for (int c = 0; c < 2; ++c) {
        const Tensor2& a = c == 0 ? cfg_.a1 : cfg_.a2;
        const double m11 = a[0][0].mean(pts), m12 = a[0][1].mean(pts);
        const double m21 = a[1][0].mean(pts), m22 = a[1][1].mean(pts);
        for (int i2 = 0; i2 < grid_.n; ++i2) {
            const double k2 = grid_.kappa(i2);
            for (int i1 = 0; i1 < grid_.n; ++i1) {
                const double k1 = grid_.kappa(i1);
                const double q = m11 * k1 * k1 + (m12 + m21) * k1 * k2 + m22 * k2 * k2;
                sym[(static_cast<size_t>(c) * grid_.n + i2) * grid_.n + i1] = std::max(0.0, q);
            }
        }
    }
    return sym;
}

SpectralField BrusselatorCoefficients::apply_A0(double, const SpectralField&,
                                                const SpectralField& v) const {
    SpectralField out(grid_);
    for (int c = 0; c < 2; ++c) {
        const Tensor2& a = c == 0 ? cfg_.a1 : cfg_.a2;
        if (a_constant_[c]) {
            const double m11 = a[0][0].c0, m12 = a[0][1].c0, m21 = a[1][0].c0, m22 = a[1][1].c0;
            for (int i2 = 0; i2 < grid_.n; ++i2) {
                const double k2 = grid_.kappa(i2);
                for (int i1 = 0; i1 < grid_.n; ++i1) {
                    const double k1 = grid_.kappa(i1);
                    const double q = m11 * k1 * k1 + (m12 + m21) * k1 * k2 + m22 * k2 * k2;
                    out.at(c, i1, i2) = q * v.at(c, i1, i2);
                }
            }
        } else {
            apply_divergence_form(grid_, a, v, c, out);
        }
    }
    return out;
}

std::vector<SpectralField> BrusselatorCoefficients::apply_B0(double, const SpectralField&,
                                                             const SpectralField& v) const {
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    const int nyq = grid_.n / 2;
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e(grid_);
        for (int c = 0; c < 2; ++c) {
            const Vec2& bn = c == 0 ? cfg_.b1[n] : cfg_.b2[n];
            if (bn[0] == 0.0 && bn[1] == 0.0) continue;
            for (int i2 = 0; i2 < grid_.n; ++i2) {
                const double k2 = i2 == nyq ? 0.0 : grid_.kappa(i2);
                for (int i1 = 0; i1 < grid_.n; ++i1) {
                    const double k1 = i1 == nyq ? 0.0 : grid_.kappa(i1);
                    e.at(c, i1, i2) = cplx(0.0, bn[0] * k1 + bn[1] * k2) * v.at(c, i1, i2);
                }
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SpectralField> BrusselatorCoefficients::F_hat(double, const SpectralField& u,
                                                          bool dealias_products) const {
    const size_t pts = static_cast<size_t>(grid_.points());

    // index 0: lambda/mu combination plus constants
    SpectralField lin(grid_);
    const ScalarCoeff* lam[2][3] = {{&cfg_.lambda0, &cfg_.lambda1, &cfg_.lambda2},
                                    {&cfg_.mu0, &cfg_.mu1, &cfg_.mu2}};
    const bool lin_const = [&] {
        for (auto& row : lam)
            for (auto* c : row)
                if (!c->constant()) return false;
        return true;
    }();
    if (lin_const) {
        for (int c = 0; c < 2; ++c) {
            const double c1 = lam[c][1]->c0, c2 = lam[c][2]->c0;
            for (int i2 = 0; i2 < grid_.n; ++i2)
                for (int i1 = 0; i1 < grid_.n; ++i1)
                    lin.at(c, i1, i2) = c1 * u.at(0, i1, i2) + c2 * u.at(1, i1, i2);
            lin.at(c, 0, 0) += lam[c][0]->c0;
        }
    } else {
        std::vector<double> u1 = u.to_physical(0), u2 = u.to_physical(1);
        std::vector<std::vector<double>> w(2, std::vector<double>(pts));
        for (int c = 0; c < 2; ++c)
            for (size_t i = 0; i < pts; ++i)
                w[c][i] = lam[c][1]->at(i) * u1[i] + lam[c][2]->at(i) * u2[i] + lam[c][0]->at(i);
        lin = from_physical_components(grid_, w);
    }

    // index 1: cubic reaction, pseudo-spectral
    SpectralField uin = u;
    if (dealias_products) dealias(uin);
    std::vector<double> u1 = uin.to_physical(0), u2 = uin.to_physical(1);
    std::vector<std::vector<double>> r(2, std::vector<double>(pts));
    for (size_t i = 0; i < pts; ++i) {
        const Vec2 f = brusselator_reaction({u1[i], u2[i]});
        r[0][i] = f[0];
        r[1][i] = f[1];
    }
    SpectralField reac = from_physical_components(grid_, r);
    if (dealias_products) dealias(reac);

    std::vector<SpectralField> out;
    out.push_back(std::move(lin));
    out.push_back(std::move(reac));
    return out;
}

std::vector<SpectralField> BrusselatorCoefficients::G(double, const SpectralField& u) const {
    if (cfg_.g_family.kind == GKind::zero || cfg_.g_family.weights.empty()) return {};
    const size_t pts = static_cast<size_t>(grid_.points());
    std::vector<double> u1 = u.to_physical(0), u2 = u.to_physical(1);
    std::vector<std::vector<double>> h(2, std::vector<double>(pts));
    for (size_t i = 0; i < pts; ++i) {
        const Vec2 v = g_pointwise({u1[i], u2[i]});
        h[0][i] = v[0];
        h[1][i] = v[1];
    }
    SpectralField hf = from_physical_components(grid_, h);
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e = hf;
        e *= cfg_.g_family.weights[n];
        out.push_back(std::move(e));
    }
    return out;
}

Vec2 BrusselatorCoefficients::g_pointwise(const Vec2& y) const {
    switch (cfg_.g_family.kind) {
        case GKind::bounded: {
            const double d = 1.0 + std::hypot(y[0], y[1]);
            return {y[0] / d, y[1] / d};
        }
        case GKind::stressor:
            return {y[0] * y[1], 0.0};
        default:
            return {0.0, 0.0};
    }
}

double BrusselatorCoefficients::linear_coeff_sup() const {
    double s = 0.0;
    for (const auto* c : {&cfg_.lambda0, &cfg_.lambda1, &cfg_.lambda2, &cfg_.mu0, &cfg_.mu1, &cfg_.mu2})
        s = std::max(s, c->sup_norm());
    return s;
}

// ---------------------------------------------------------------------------
// AllenCahnCoefficients
// ---------------------------------------------------------------------------

AllenCahnCoefficients::AllenCahnCoefficients(const TorusGrid& g, Config cfg,
                                             CriticalityParams params)
    : CoefficientSet(g, static_cast<int>(cfg.b.size()), std::move(params)), cfg_(std::move(cfg)) {}

std::shared_ptr<AllenCahnCoefficients> AllenCahnCoefficients::make(const TorusGrid& grid,
                                                                   Config cfg) {
    if (grid.components != 1)
        throw std::invalid_argument("allen_cahn: scalar grid required");
    if (!cfg.g_family.weights.empty() && cfg.g_family.weights.size() != cfg.b.size())
        throw std::invalid_argument("allen_cahn: g weights must match noise mode count");
    if (cfg.g_family.kind == GKind::stressor)
        throw std::invalid_argument("allen_cahn: stressor family is two-component only");
    double bsq = 0.0;
    for (const auto& bn : cfg.b) bsq += bn[0] * bn[0] + bn[1] * bn[1];
    if (!(1.0 - 0.5 * bsq > 0.0))
        throw std::invalid_argument("allen_cahn: noise-smallness 1 - |b|^2/2 > 0 violated");
    if (cfg.C0 < 0.0 || cfg.C1 < 0.0 || cfg.C1 > 2.0)
        throw std::invalid_argument("allen_cahn: need C0 >= 0 and C1 in [0,2]");

    auto params = CriticalityParams::make({{1.0, 0.75}}, {{2.0, 5.0 / 6.0, 0.5}});
    return std::shared_ptr<AllenCahnCoefficients>(
        new AllenCahnCoefficients(grid, std::move(cfg), std::move(params)));
}

double AllenCahnCoefficients::b_l2sq() const {
    double s = 0.0;
    for (const auto& bn : cfg_.b) s += bn[0] * bn[0] + bn[1] * bn[1];
    return s;
}

std::vector<double> AllenCahnCoefficients::implicit_symbol(double, const SpectralField&) const {
    std::vector<double> sym(grid_.total_coeffs());
    for (int i2 = 0; i2 < grid_.n; ++i2) {
        const double k2 = grid_.kappa(i2);
        for (int i1 = 0; i1 < grid_.n; ++i1) {
            const double k1 = grid_.kappa(i1);
            sym[static_cast<size_t>(i2) * grid_.n + i1] = k1 * k1 + k2 * k2;
        }
    }
    return sym;
}

SpectralField AllenCahnCoefficients::apply_A0(double, const SpectralField&,
                                              const SpectralField& v) const {
    return apply_multiplier(v, [](double k1, double k2) { return k1 * k1 + k2 * k2; });
}

std::vector<SpectralField> AllenCahnCoefficients::apply_B0(double, const SpectralField&,
                                                           const SpectralField& v) const {
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    const int nyq = grid_.n / 2;
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e(grid_);
        const Vec2& bn = cfg_.b[n];
        for (int i2 = 0; i2 < grid_.n; ++i2) {
            const double k2 = i2 == nyq ? 0.0 : grid_.kappa(i2);
            for (int i1 = 0; i1 < grid_.n; ++i1) {
                const double k1 = i1 == nyq ? 0.0 : grid_.kappa(i1);
                e.at(0, i1, i2) = cplx(0.0, bn[0] * k1 + bn[1] * k2) * v.at(0, i1, i2);
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SpectralField> AllenCahnCoefficients::F_hat(double, const SpectralField& u,
                                                        bool dealias_products) const {
    SpectralField uin = u;
    if (dealias_products) dealias(uin);
    std::vector<double> p = uin.to_physical(0);
    for (double& y : p) y = y - y * y * y;
    SpectralField f = SpectralField::from_physical(grid_, p);
    if (dealias_products) dealias(f);
    return {std::move(f)};
}

std::vector<SpectralField> AllenCahnCoefficients::G(double, const SpectralField& u) const {
    if (cfg_.g_family.kind == GKind::zero || cfg_.g_family.weights.empty()) return {};
    std::vector<double> p = u.to_physical(0);
    for (double& y : p) {
        if (cfg_.g_family.kind == GKind::quad_odd)
            y = y * std::abs(y);
        else
            y = y / (1.0 + std::abs(y));
    }
    SpectralField hf = SpectralField::from_physical(grid_, p);
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e = hf;
        e *= cfg_.g_family.weights[n];
        out.push_back(std::move(e));
    }
    return out;
}

void AllenCahnCoefficients::project_state(SpectralField& u) const {
    project_sine_odd(u);
}

// ---------------------------------------------------------------------------
// NavierStokesCoefficients
// ---------------------------------------------------------------------------

NavierStokesCoefficients::NavierStokesCoefficients(const TorusGrid& g, Config cfg,
                                                   CriticalityParams params)
    : CoefficientSet(g, static_cast<int>(cfg.b.size()), std::move(params)), cfg_(std::move(cfg)) {
    for (const auto& bn : cfg_.b) {
        a_b_[0][0] += 0.5 * bn[0] * bn[0];
        a_b_[0][1] += 0.5 * bn[0] * bn[1];
        a_b_[1][0] += 0.5 * bn[1] * bn[0];
        a_b_[1][1] += 0.5 * bn[1] * bn[1];
    }
}

std::shared_ptr<NavierStokesCoefficients> NavierStokesCoefficients::make(const TorusGrid& grid,
                                                                         Config cfg) {
    if (grid.components != 2)
        throw std::invalid_argument("navier_stokes: 2-component grid required");
    if (!(cfg.nu > 0)) throw std::invalid_argument("navier_stokes: nu must be positive");
    for (const auto& bn : cfg.b)
        if (!std::isfinite(bn[0]) || !std::isfinite(bn[1]))
            throw std::invalid_argument("navier_stokes: b must be bounded");
    // quadratic advection: dual-scale value with (rho_hat, beta_hat) = (1, 3/4)
    auto params = CriticalityParams::make({{1.0, 0.75}}, {{1.0, 0.75, 0.0}});
    return std::shared_ptr<NavierStokesCoefficients>(
        new NavierStokesCoefficients(grid, std::move(cfg), std::move(params)));
}

std::vector<double> NavierStokesCoefficients::implicit_symbol(double, const SpectralField&) const {
    std::vector<double> sym(grid_.total_coeffs());
    for (int c = 0; c < 2; ++c)
        for (int i2 = 0; i2 < grid_.n; ++i2) {
            const double k2 = grid_.kappa(i2);
            for (int i1 = 0; i1 < grid_.n; ++i1) {
                const double k1 = grid_.kappa(i1);
                const double ksq = k1 * k1 + k2 * k2;
                const double corr = a_b_[0][0] * k1 * k1 + (a_b_[0][1] + a_b_[1][0]) * k1 * k2 +
                                    a_b_[1][1] * k2 * k2;
                sym[(static_cast<size_t>(c) * grid_.n + i2) * grid_.n + i1] =
                    cfg_.nu * ksq + cfg_.correction_weight * std::max(0.0, corr);
            }
        }
    return sym;
}

SpectralField NavierStokesCoefficients::apply_A0(double, const SpectralField&,
                                                 const SpectralField& v) const {
    SpectralField pv = leray_project(v);
    SpectralField out(grid_);
    for (int c = 0; c < 2; ++c)
        for (int i2 = 0; i2 < grid_.n; ++i2) {
            const double k2 = grid_.kappa(i2);
            for (int i1 = 0; i1 < grid_.n; ++i1) {
                const double k1 = grid_.kappa(i1);
                const double ksq = k1 * k1 + k2 * k2;
                const double corr = a_b_[0][0] * k1 * k1 + (a_b_[0][1] + a_b_[1][0]) * k1 * k2 +
                                    a_b_[1][1] * k2 * k2;
                out.at(c, i1, i2) =
                    (cfg_.nu * ksq + cfg_.correction_weight * corr) * pv.at(c, i1, i2);
            }
        }
    return out;
}

std::vector<SpectralField> NavierStokesCoefficients::apply_B0(double, const SpectralField&,
                                                              const SpectralField& v) const {
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    const int nyq = grid_.n / 2;
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e(grid_);
        const Vec2& bn = cfg_.b[n];
        for (int c = 0; c < 2; ++c)
            for (int i2 = 0; i2 < grid_.n; ++i2) {
                const double k2 = i2 == nyq ? 0.0 : grid_.kappa(i2);
                for (int i1 = 0; i1 < grid_.n; ++i1) {
                    const double k1 = i1 == nyq ? 0.0 : grid_.kappa(i1);
                    e.at(c, i1, i2) = cplx(0.0, bn[0] * k1 + bn[1] * k2) * v.at(c, i1, i2);
                }
            }
        out.push_back(leray_project(e));
    }
    return out;
}

std::vector<SpectralField> NavierStokesCoefficients::F_hat(double, const SpectralField& u,
                                                           bool dealias_products) const {
    return {ns_nonlinearity(u, dealias_products)};
}

void NavierStokesCoefficients::project_state(SpectralField& u) const {
    u = leray_project(u);
}

SpectralField ns_nonlinearity(const SpectralField& u, bool dealias_products) {
    const TorusGrid& g = u.grid();
    if (g.components != 2)
        throw std::invalid_argument("ns_nonlinearity: 2-component field required");
    SpectralField uin = u;
    if (dealias_products) dealias(uin);
    std::vector<double> u1 = uin.to_physical(0), u2 = uin.to_physical(1);
    const size_t pts = u1.size();
    std::vector<double> t11(pts), t12(pts), t22(pts);
    for (size_t i = 0; i < pts; ++i) {
        t11[i] = u1[i] * u1[i];
        t12[i] = u1[i] * u2[i];
        t22[i] = u2[i] * u2[i];
    }
    TorusGrid sg = g;
    sg.components = 1;
    SpectralField f11 = SpectralField::from_physical(sg, t11);
    SpectralField f12 = SpectralField::from_physical(sg, t12);
    SpectralField f22 = SpectralField::from_physical(sg, t22);
    SpectralField out(g);
    const int nyq = g.n / 2;
    for (int i2 = 0; i2 < g.n; ++i2) {
        const double k2 = i2 == nyq ? 0.0 : g.kappa(i2);
        for (int i1 = 0; i1 < g.n; ++i1) {
            const double k1 = i1 == nyq ? 0.0 : g.kappa(i1);
            // component j of div(u (x) u): i k_l (u_j u_l)^
            out.at(0, i1, i2) = -(cplx(0.0, k1) * f11.at(0, i1, i2) + cplx(0.0, k2) * f12.at(0, i1, i2));
            out.at(1, i1, i2) = -(cplx(0.0, k1) * f12.at(0, i1, i2) + cplx(0.0, k2) * f22.at(0, i1, i2));
        }
    }
    out = leray_project(out);
    if (dealias_products) dealias(out);
    return out;
}

SpectralField ns_tilde_A(const SpectralField& u, const NavierStokesCoefficients& coeffs) {
    const TorusGrid& g = u.grid();
    if (g.components != 2)
        throw std::invalid_argument("ns_tilde_A: 2-component field required");
    const double tol = 1e-8 * (1.0 + v_norm(u));
    if (divergence_linf(u) > tol)
        throw std::invalid_argument("ns_tilde_A: input must be divergence-free");
    // constant directions: (b_n . grad)u is divergence-free, so the
    // (I - P) term drops and only P div(a_b grad u) survives.
    const auto& a = coeffs.a_b();
    SpectralField out(g);
    for (int c = 0; c < 2; ++c)
        for (int i2 = 0; i2 < g.n; ++i2) {
            const double k2 = g.kappa(i2);
            for (int i1 = 0; i1 < g.n; ++i1) {
                const double k1 = g.kappa(i1);
                const double q = a[0][0] * k1 * k1 + (a[0][1] + a[1][0]) * k1 * k2 + a[1][1] * k2 * k2;
                out.at(c, i1, i2) = -q * u.at(c, i1, i2);
            }
        }
    return leray_project(out);
}

// ---------------------------------------------------------------------------
// ScalarLinearCoefficients
// ---------------------------------------------------------------------------

ScalarLinearCoefficients::ScalarLinearCoefficients(const TorusGrid& g, Config cfg,
                                                   CriticalityParams params)
    : CoefficientSet(g, cfg.noise_modes, std::move(params)), cfg_(cfg) {}

std::shared_ptr<ScalarLinearCoefficients> ScalarLinearCoefficients::make(const TorusGrid& grid,
                                                                         Config cfg) {
    if (grid.components != 1)
        throw std::invalid_argument("scalar_linear: scalar grid required");
    if (cfg.nu < 0) throw std::invalid_argument("scalar_linear: nu must be >= 0");
    if (cfg.noise_modes < 1) throw std::invalid_argument("scalar_linear: need >= 1 noise mode");
    auto params = CriticalityParams::make({{0.0, 0.75}}, {{1.0, 0.75, 0.0}});
    return std::shared_ptr<ScalarLinearCoefficients>(
        new ScalarLinearCoefficients(grid, cfg, std::move(params)));
}

std::vector<double> ScalarLinearCoefficients::implicit_symbol(double, const SpectralField&) const {
    std::vector<double> sym(grid_.total_coeffs());
    for (int i2 = 0; i2 < grid_.n; ++i2) {
        const double k2 = grid_.kappa(i2);
        for (int i1 = 0; i1 < grid_.n; ++i1) {
            const double k1 = grid_.kappa(i1);
            sym[static_cast<size_t>(i2) * grid_.n + i1] =
                std::max(0.0, cfg_.lambda) + cfg_.nu * (k1 * k1 + k2 * k2);
        }
    }
    return sym;
}

SpectralField ScalarLinearCoefficients::apply_A0(double, const SpectralField&,
                                                 const SpectralField& v) const {
    return apply_multiplier(v, [this](double k1, double k2) {
        return cfg_.lambda + cfg_.nu * (k1 * k1 + k2 * k2);
    });
}

std::vector<SpectralField> ScalarLinearCoefficients::apply_B0(double, const SpectralField&,
                                                              const SpectralField& v) const {
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    for (int n = 0; n < noise_modes_; ++n) {
        if (n == 0 && cfg_.b_mult != 0.0) {
            SpectralField e = v;
            e *= cfg_.b_mult;
            out.push_back(std::move(e));
        } else {
            out.emplace_back(grid_);
        }
    }
    return out;
}

std::vector<SpectralField> ScalarLinearCoefficients::g_inhom(double) const {
    if (cfg_.sigma_add == 0.0) return {};
    std::vector<SpectralField> out;
    out.reserve(noise_modes_);
    for (int n = 0; n < noise_modes_; ++n) {
        SpectralField e(grid_);
        if (n == 0) e.at(0, 0, 0) = cfg_.sigma_add;
        out.push_back(std::move(e));
    }
    return out;
}

std::function<SpectralField(double, const SpectralField&)>
scalar_strat_correction(const std::shared_ptr<ScalarLinearCoefficients>& coeffs) {
    const double half_bsq = 0.5 * coeffs->config().b_mult * coeffs->config().b_mult;
    return [half_bsq](double, const SpectralField& u) {
        SpectralField out = u;
        out *= half_bsq;
        return out;
    };
}

std::function<SpectralField(double, const SpectralField&)>
ns_strat_correction(const std::shared_ptr<NavierStokesCoefficients>& coeffs) {
    return [coeffs](double, const SpectralField& u) { return ns_tilde_A(u, *coeffs); };
}

} // namespace ldplab
