#include "ldplab/checks.hpp"

#include "ldplab/noise.hpp"
#include "ldplab/norms.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldplab {

nlohmann::json CheckReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["verdict"] = verdict == Verdict::pass ? "pass"
                 : verdict == Verdict::fail ? "fail"
                                            : "inconclusive";
    j["margin"] = margin;
    j["samples"] = samples;
    j["seed"] = seed;
    j["witnesses"] = nlohmann::json::array();
    for (const auto& w : witnesses)
        j["witnesses"].push_back({{"description", w.description},
                                  {"lhs", w.lhs},
                                  {"rhs", w.rhs},
                                  {"margin", w.margin},
                                  {"sample_index", w.sample_index}});
    for (const auto& [k, v] : extra) j[k] = v;
    return j;
}

namespace {

CheckReport arithmetic_report(std::string name, double margin, bool strict = false) {
    CheckReport r;
    r.name = std::move(name);
    r.margin = margin;
    r.samples = 0;
    const bool ok = strict ? margin > 0.0 : margin >= 0.0;
    r.verdict = ok ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    if (!ok)
        r.witnesses.push_back({"arithmetic margin violation", 0.0, -margin, margin, 0});
    return r;
}

void keep_worst(std::vector<Witness>& ws, Witness w) {
    ws.push_back(std::move(w));
    std::sort(ws.begin(), ws.end(),
              [](const Witness& a, const Witness& b) { return a.margin < b.margin; });
    if (ws.size() > 5) ws.resize(5);
}

double min_eig_sym2(double a11, double a12, double a21, double a22) {
    const double s = 0.5 * (a12 + a21);
    const double tr = a11 + a22;
    const double det = a11 * a22 - s * s;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return 0.5 * tr - disc;
}

} // namespace

CheckReport check_subcriticality(double rho, double beta) {
    if (rho < 0.0) throw std::domain_error("check_subcriticality: rho must be >= 0");
    if (!(beta > 0.5 && beta < 1.0))
        throw std::domain_error("check_subcriticality: beta must lie in (1/2, 1)");
    auto r = arithmetic_report("subcriticality", 1.0 - (1.0 + rho) * (2.0 * beta - 1.0));
    r.extra = {{"rho", rho}, {"beta", beta}};
    return r;
}

CheckReport check_alpha_subcriticality(double rho_hat, double beta_hat, double alpha) {
    if (rho_hat < 0.0)
        throw std::domain_error("check_alpha_subcriticality: rho_hat must be >= 0");
    if (!(beta_hat > 0.5 && beta_hat <= 1.0))
        throw std::domain_error("check_alpha_subcriticality: beta_hat must lie in (1/2, 1]");
    if (alpha < 0.0 || alpha > 0.5)
        throw std::domain_error("check_alpha_subcriticality: alpha must lie in [0, 1/2]");
    auto r = arithmetic_report("alpha_subcriticality",
                               1.0 + 2.0 * alpha - (1.0 + rho_hat) * (2.0 * beta_hat - 1.0));
    r.extra = {{"rho_hat", rho_hat}, {"beta_hat", beta_hat}, {"alpha", alpha}};
    return r;
}

CheckReport check_allen_cahn_noise(double b_l2sq, double C0, double C1) {
    const double margin = 1.0 - 0.5 * b_l2sq;
    CheckReport r = arithmetic_report("allen_cahn_noise", margin, /*strict=*/true);
    if (C0 < 0.0 || C1 < 0.0 || C1 > 2.0) {
        r.verdict = CheckReport::Verdict::fail;
        keep_worst(r.witnesses, {"growth constants out of range", 0.0, 0.0, -1.0, 0});
    }
    r.extra = {{"b_l2sq", b_l2sq}, {"C0", C0}, {"C1", C1}};
    return r;
}

CheckReport check_parabolicity(const std::vector<std::array<std::array<double, 2>, 2>>& a,
                               const std::vector<std::vector<Vec2>>& b, long samples) {
    CheckReport r;
    r.name = "parabolicity";
    size_t pts = a.size();
    for (const auto& bn : b) pts = std::max(pts, bn.size());
    double nu = std::numeric_limits<double>::infinity();
    size_t worst_idx = 0;
    for (size_t p = 0; p < pts; ++p) {
        const auto& ap = a.size() == 1 ? a[0] : a[p];
        double q11 = 0, q12 = 0, q22 = 0;
        for (const auto& bn : b) {
            const Vec2& v = bn.size() == 1 ? bn[0] : bn[p];
            q11 += 0.5 * v[0] * v[0];
            q12 += 0.5 * v[0] * v[1];
            q22 += 0.5 * v[1] * v[1];
        }
        const double e = min_eig_sym2(ap[0][0] - q11, ap[0][1] - q12, ap[1][0] - q12,
                                      ap[1][1] - q22);
        if (e < nu) {
            nu = e;
            worst_idx = p;
        }
    }
    // direction sweep cross-check (coarser than the exact eigenvalue)
    double nu_dir = std::numeric_limits<double>::infinity();
    const long ndir = std::max<long>(1, std::min<long>(samples, 64));
    for (long d = 0; d < ndir; ++d) {
        const double phi = std::numbers::pi * static_cast<double>(d) / static_cast<double>(ndir);
        const double x1 = std::cos(phi), x2 = std::sin(phi);
        for (size_t p = 0; p < pts; ++p) {
            const auto& ap = a.size() == 1 ? a[0] : a[p];
            double q = ap[0][0] * x1 * x1 + (ap[0][1] + ap[1][0]) * x1 * x2 + ap[1][1] * x2 * x2;
            for (const auto& bn : b) {
                const Vec2& v = bn.size() == 1 ? bn[0] : bn[p];
                const double bd = v[0] * x1 + v[1] * x2;
                q -= 0.5 * bd * bd;
            }
            nu_dir = std::min(nu_dir, q);
        }
    }
    r.margin = nu;
    r.samples = static_cast<long>(pts) * ndir;
    r.verdict = nu > 0.0 ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    if (!r.passed())
        keep_worst(r.witnesses,
                   {"degenerate direction at point " + std::to_string(worst_idx), nu, 0.0, nu,
                    static_cast<uint64_t>(worst_idx)});
    r.extra = {{"nu", nu}, {"nu_direction_sweep", nu_dir}};
    return r;
}

CheckReport check_parabolicity(const BrusselatorCoefficients& coeffs, long samples) {
    const auto& cfg = coeffs.config();
    const size_t pts = static_cast<size_t>(coeffs.grid().points());
    CheckReport out;
    out.name = "parabolicity";
    out.margin = std::numeric_limits<double>::infinity();
    for (int comp = 0; comp < 2; ++comp) {
        const Tensor2& t = comp == 0 ? cfg.a1 : cfg.a2;
        const auto& bv = comp == 0 ? cfg.b1 : cfg.b2;
        const bool tconst = t[0][0].constant() && t[0][1].constant() && t[1][0].constant() &&
                            t[1][1].constant();
        std::vector<std::array<std::array<double, 2>, 2>> a;
        const size_t scan = tconst ? 1 : pts;
        a.reserve(scan);
        for (size_t p = 0; p < scan; ++p)
            a.push_back({{{t[0][0].at(p), t[0][1].at(p)}, {t[1][0].at(p), t[1][1].at(p)}}});
        std::vector<std::vector<Vec2>> b;
        for (const auto& bn : bv) b.push_back({bn});
        CheckReport r = check_parabolicity(a, b, samples);
        out.samples += r.samples;
        out.margin = std::min(out.margin, r.margin);
        out.extra.emplace_back("nu_" + std::to_string(comp + 1), r.margin);
        for (auto& w : r.witnesses) {
            w.description = "component " + std::to_string(comp + 1) + ": " + w.description;
            keep_worst(out.witnesses, w);
        }
    }
    out.verdict = out.margin > 0.0 ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    return out;
}

CheckReport check_growth_envelope(const BrusselatorCoefficients& coeffs, long samples,
                                  double box, uint64_t seed) {
    const auto& cfg = coeffs.config();
    for (int i = 0; i < 2; ++i)
        if (!(cfg.delta < coeffs.nu(i)))
            throw std::domain_error("check_growth_envelope: delta must stay below nu");
    CheckReport r;
    r.name = "growth_envelope";
    r.seed = seed;
    r.samples = samples;
    r.margin = std::numeric_limits<double>::infinity();

    // per-component coupling sum_n |b_n| |c_n| and weight energy
    double cross[2] = {0, 0};
    for (size_t n = 0; n < cfg.b1.size(); ++n) {
        const double c = cfg.g_family.weights.empty() ? 0.0 : std::abs(cfg.g_family.weights[n]);
        cross[0] += std::hypot(cfg.b1[n][0], cfg.b1[n][1]) * c;
        cross[1] += std::hypot(cfg.b2[n][0], cfg.b2[n][1]) * c;
    }
    const double csq = cfg.g_family.weight_l2sq();

    for (long s = 0; s < samples; ++s) {
        const Vec2 y = {box * (2.0 * counter_uniform(seed, s, 0, 0) - 1.0),
                        box * (2.0 * counter_uniform(seed, s, 1, 0) - 1.0)};
        const Vec2 h = coeffs.g_pointwise(y);
        const double y1 = std::abs(y[0]), y2 = std::abs(y[1]);
        const double n1 = cfg.M * (1.0 + y1 * y1) + (1.0 - cfg.epsilon_growth) * y1 * y1 * y2 * y2;
        const double n2 =
            cfg.M * (1.0 + (1.0 + y1 * y1) * y2 * y2 + y1 * y2 * y2 * y2 + y1 * y1 * y1 * y1);
        const double N[2] = {n1, n2};
        for (int i = 0; i < 2; ++i) {
            const double gi = h[i];
            const double lhs = cross[i] * cross[i] * gi * gi / (4.0 * (coeffs.nu(i) - cfg.delta)) +
                               0.5 * csq * gi * gi;
            const double margin = N[i] - lhs;
            if (margin < r.margin) r.margin = margin;
            if (margin < 0.0)
                keep_worst(r.witnesses,
                           {"component " + std::to_string(i + 1) + " at y=(" +
                                std::to_string(y[0]) + "," + std::to_string(y[1]) + ")",
                            N[i], lhs, margin, static_cast<uint64_t>(s)});
        }
    }
    r.verdict = r.margin >= 0.0 ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    return r;
}

namespace {

// Sampled quadratic-form data for the coercivity fits.
struct FormSample {
    double lhs;    // <A.,.> - (1/2)||B.||^2
    double vsq;    // ||v||_V^2
    double hsq;    // ||v||_H^2
    std::string tag;
    uint64_t index;
};

// max over M in [0, m_cap] of min_i (lhs_i + M hsq_i + shift) / vsq_i
// (concave piecewise-linear in M: ternary search).
std::pair<double, double> fit_theta(const std::vector<FormSample>& s, double m_cap, double shift) {
    auto theta = [&](double M) {
        double t = std::numeric_limits<double>::infinity();
        for (const auto& f : s) t = std::min(t, (f.lhs + M * f.hsq + shift) / f.vsq);
        return t;
    };
    double lo = 0.0, hi = m_cap;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (theta(m1) < theta(m2))
            lo = m1;
        else
            hi = m2;
    }
    const double M = 0.5 * (lo + hi);
    return {theta(M), M};
}

// Single-mode probe; for vector fields the mode amplitude sits orthogonal
// to k so divergence-free projections keep it.
void set_mode_probe(SpectralField& v, int f1, int f2, cplx a) {
    const TorusGrid& g = v.grid();
    if (g.components == 1) {
        v.set_mode(0, f1, f2, a);
        return;
    }
    const double norm = std::hypot(static_cast<double>(f1), static_cast<double>(f2));
    const double p1 = norm == 0.0 ? 1.0 : -f2 / norm;
    const double p2 = norm == 0.0 ? 0.0 : f1 / norm;
    v.set_mode(0, f1, f2, p1 * a);
    v.set_mode(1, f1, f2, p2 * a);
}

// Mixed sampler: smooth/rough random fields, single modes across the band,
// amplitude ladders, and (two-component grids) same-sign structured pairs.
std::vector<SpectralField> coercivity_samples(const CoefficientSet& coeffs, long samples,
                                              uint64_t seed, std::vector<std::string>* tags) {
    const TorusGrid& g = coeffs.grid();
    const int band = g.dealias_band();
    std::vector<SpectralField> out;
    out.reserve(samples);
    const double ladder[5] = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (long s = 0; s < samples; ++s) {
        SpectralField v(g);
        std::string tag;
        switch (s % 8) {
            case 0:
            case 1:
            case 2: {  // random smooth, amplitude ladder
                const double amp = ladder[(s / 8) % 5];
                v = random_field(g, {seed + static_cast<uint64_t>(s), amp, 1.5, band, false});
                tag = "random_smooth";
                break;
            }
            case 3: {  // random rough
                v = random_field(g, {seed + static_cast<uint64_t>(s), 1.0, 0.5, band, false});
                tag = "random_rough";
                break;
            }
            case 4: {  // single mode sweeping the band diagonal
                const int f = 1 + static_cast<int>(s / 8) % band;
                set_mode_probe(v, f, std::max(0, band - f), cplx(0.0, -0.5));
                tag = "single_mode";
                break;
            }
            case 5: {  // top band corner (drives the high-frequency ratio)
                set_mode_probe(v, band, band, cplx(0.3, 0.1));
                tag = "corner_mode";
                break;
            }
            case 6: {  // near-constant
                v = SpectralField::constant(g, std::vector<double>(g.components, ladder[(s / 8) % 5]));
                v.set_mode(0, 1, 0, cplx(0.05, 0.0));
                tag = "near_constant";
                break;
            }
            case 7: {  // structured same-sign pair (quartic drift stressor)
                if (g.components == 2) {
                    const double c = ladder[(s / 8) % 5];
                    std::vector<double> w(static_cast<size_t>(g.points()));
                    for (int i2 = 0; i2 < g.n; ++i2)
                        for (int i1 = 0; i1 < g.n; ++i1)
                            w[static_cast<size_t>(i2) * g.n + i1] =
                                1.0 + std::cos(2.0 * std::numbers::pi * i1 / g.n);
                    std::vector<double> all(w.size() * 2);
                    for (size_t i = 0; i < w.size(); ++i) {
                        all[i] = c * w[i];
                        all[w.size() + i] = 2.0 * c * w[i];
                    }
                    v = SpectralField::from_physical(g, all);
                    tag = "same_sign_pair(c=" + std::to_string(c) + ")";
                } else {
                    v = random_field(g, {seed + static_cast<uint64_t>(s), 2.0, 1.0, band, false});
                    tag = "random_large";
                }
                break;
            }
        }
        dealias(v);
        coeffs.project_state(v);
        if (h_norm(v) == 0.0) {
            v = random_field(g, {seed ^ (static_cast<uint64_t>(s) + 77), 1.0, 1.5, band, false});
            dealias(v);
            coeffs.project_state(v);
            tag = "random_fallback";
        }
        out.push_back(std::move(v));
        if (tags) tags->push_back(tag);
    }
    return out;
}

// The cap on M bounds how much theta a dissipation-free form can fake from
// finite samples; on coarse grids the admissible cap shrinks with the band
// so the floor stays a genuine separator.
double effective_m_cap(const TorusGrid& g, double m_cap) {
    const double kmax = 2.0 * std::numbers::pi * g.dealias_band() / g.period;
    return std::min(m_cap, (1.0 + 2.0 * kmax * kmax) / 8.0);
}

double theta_floor(const TorusGrid& g, double m_cap_eff) {
    const double kmax = 2.0 * std::numbers::pi * g.dealias_band() / g.period;
    return std::max(1e-6, 2.0 * m_cap_eff / (1.0 + 2.0 * kmax * kmax));
}

} // namespace

CheckReport check_linear_coercivity(const CoefficientSet& coeffs, long samples, uint64_t seed,
                                    const CoercivityFitOptions& opt) {
    CheckReport r;
    r.name = "linear_coercivity";
    r.seed = seed;
    r.samples = samples;
    std::vector<std::string> tags;
    const auto vs = coercivity_samples(coeffs, samples, seed, &tags);

    std::vector<FormSample> fs;
    fs.reserve(vs.size());
    for (size_t i = 0; i < vs.size(); ++i) {
        SpectralField u = random_field(coeffs.grid(), {seed ^ 0x5eedu ^ static_cast<uint64_t>(i),
                                                       1.0, 1.5, -1, false});
        const double hn = h_norm(u);
        if (hn > opt.n_ball) u *= opt.n_ball / hn;
        coeffs.project_state(u);
        const SpectralField& v = vs[i];
        const double a0 = pair_duality(coeffs.apply_A0(opt.t, u, v), v);
        const auto b0 = coeffs.apply_B0(opt.t, u, v);
        const double hs = hilbert_schmidt_norm(b0);
        const double hv = h_norm(v), vv = v_norm(v);
        fs.push_back({a0 - 0.5 * hs * hs, vv * vv, hv * hv, tags[i], static_cast<uint64_t>(i)});
    }
    const double m_cap = effective_m_cap(coeffs.grid(), opt.m_cap);
    const auto [theta, M] = fit_theta(fs, m_cap, 0.0);
    const double floor = theta_floor(coeffs.grid(), m_cap);
    r.margin = theta - floor;
    r.verdict = theta > floor ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    r.extra = {{"theta_hat", theta}, {"m_hat", M}, {"theta_floor", floor}};
    if (!r.passed())
        for (const auto& f : fs) {
            const double ratio = (f.lhs + M * f.hsq) / f.vsq;
            if (ratio <= theta + 1e-12)
                keep_worst(r.witnesses, {f.tag, ratio, floor, ratio - floor, f.index});
        }
    return r;
}

CheckReport check_full_coercivity(const CoefficientSet& coeffs, long samples, uint64_t seed,
                                  const CoercivityFitOptions& opt) {
    CheckReport r;
    r.name = "full_coercivity";
    r.seed = seed;
    r.samples = samples;
    std::vector<std::string> tags;
    const auto vs = coercivity_samples(coeffs, samples, seed, &tags);

    const auto* bruss = dynamic_cast<const BrusselatorCoefficients*>(&coeffs);

    std::vector<FormSample> fs;
    std::vector<double> reaction_share(vs.size(), 0.0);
    fs.reserve(vs.size());
    for (size_t i = 0; i < vs.size(); ++i) {
        const SpectralField& v = vs[i];
        double pair_a = pair_duality(coeffs.apply_A0(opt.t, v, v), v);
        const auto fh = coeffs.F_hat(opt.t, v, /*dealias_products=*/false);
        double reaction_pair = 0.0;
        for (size_t q = 0; q < fh.size(); ++q) {
            const double p = pair_duality(fh[q], v);
            pair_a -= p;
            if (bruss && q == 1) reaction_pair = p;
        }
        for (const auto& f : coeffs.f_hat(opt.t)) pair_a -= pair_duality(f, v);
        const auto b = apply_diffusion(coeffs, opt.t, v);
        const double hs = hilbert_schmidt_norm(b);
        const double hv = h_norm(v), vv = v_norm(v);
        const double lhs = pair_a - 0.5 * hs * hs;
        reaction_share[i] = std::abs(reaction_pair) / (1.0 + std::abs(lhs));
        fs.push_back({lhs, vv * vv, hv * hv, tags[i], static_cast<uint64_t>(i)});
    }
    const double m_cap = effective_m_cap(coeffs.grid(), opt.m_cap);
    const auto [theta, M] = fit_theta(fs, m_cap, opt.phi_sq_cap);
    const double floor = theta_floor(coeffs.grid(), m_cap);
    r.margin = theta - floor;
    r.verdict = theta > floor ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    r.extra = {{"theta_hat", theta}, {"m_hat", M}, {"theta_floor", floor},
               {"phi_sq_cap", opt.phi_sq_cap}};
    if (!r.passed()) {
        for (size_t i = 0; i < fs.size(); ++i) {
            const auto& f = fs[i];
            const double ratio = (f.lhs + M * f.hsq + opt.phi_sq_cap) / f.vsq;
            if (ratio <= theta + 1e-9 * std::abs(theta) + 1e-12) {
                std::string desc = f.tag;
                if (bruss && reaction_share[i] > 0.5)
                    desc += ": quartic reaction pairing u1*u2^3 dominates the deficit";
                keep_worst(r.witnesses, {desc, ratio, floor, ratio - floor, f.index});
            }
        }
    }
    return r;
}

CheckReport check_g_lipschitz(const CoefficientSet& coeffs, double beta, long samples,
                              uint64_t seed) {
    CheckReport r;
    r.name = "g_lipschitz";
    r.seed = seed;
    r.samples = samples;
    std::vector<double> ratios;
    ratios.reserve(samples);
    for (long s = 0; s < samples; ++s) {
        SpectralField u = random_field(coeffs.grid(), {seed + 2 * static_cast<uint64_t>(s), 1.0, 1.2, -1, false});
        SpectralField v = random_field(coeffs.grid(), {seed + 2 * static_cast<uint64_t>(s) + 1, 1.0, 1.2, -1, false});
        coeffs.project_state(u);
        coeffs.project_state(v);
        const auto gu = coeffs.G(0.0, u), gv = coeffs.G(0.0, v);
        if (gu.empty() || gv.empty()) {
            ratios.push_back(0.0);
            continue;
        }
        double num = 0.0;
        for (size_t n = 0; n < gu.size(); ++n) {
            const double d = h_norm(gu[n] - gv[n]);
            num += d * d;
        }
        num = std::sqrt(num);
        const double bu = norm_theta(u, beta), bv = norm_theta(v, beta);
        SpectralField d = u - v;
        const double bd = norm_theta(d, beta);
        if (bd == 0.0) {
            ratios.push_back(0.0);
            continue;
        }
        ratios.push_back(num / ((1.0 + bu + bv) * bd));
    }
    const long half = samples / 2;
    double c_hat = 0.0;
    for (long s = 0; s < half; ++s) c_hat = std::max(c_hat, ratios[s]);
    double margin = std::numeric_limits<double>::infinity();
    for (long s = half; s < samples; ++s) {
        const double m = 1.05 * c_hat - ratios[s];
        if (m < margin) margin = m;
        if (m < 0.0)
            keep_worst(r.witnesses, {"validation ratio above fitted envelope", 1.05 * c_hat,
                                     ratios[s], m, static_cast<uint64_t>(s)});
    }
    r.margin = margin;
    r.verdict = margin >= 0.0 ? CheckReport::Verdict::pass : CheckReport::Verdict::fail;
    r.extra = {{"c_hat", c_hat}, {"beta", beta}};
    return r;
}

} // namespace ldplab
