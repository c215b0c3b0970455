#include "ldplab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace ldplab {

double norm_theta(const SpectralField& f, double theta) {
    if (theta < 0.0 || theta > 1.0)
        throw std::domain_error("norm_theta: theta must lie in [0,1]");
    const TorusGrid& g = f.grid();
    const double expo = 2.0 * theta - 1.0;
    double sum = 0.0;
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < g.n; ++i2) {
            const double k2 = g.kappa(i2);
            for (int i1 = 0; i1 < g.n; ++i1) {
                const double k1 = g.kappa(i1);
                const double w = std::pow(1.0 + k1 * k1 + k2 * k2, expo);
                sum += w * std::norm(f.at(c, i1, i2));
            }
        }
    return std::sqrt(g.volume() * sum);
}

double verify_interpolation(const SpectralField& f, double theta) {
    const double v = v_norm(f);
    if (v == 0.0)
        throw std::domain_error("verify_interpolation: zero field is degenerate");
    return norm_theta(f, theta) - std::pow(vstar_norm(f), 1.0 - theta) * std::pow(v, theta);
}

double pair_duality(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("pair_duality: mismatched grids");
    double sum = 0.0;
    const auto& x = a.data();
    const auto& y = b.data();
    for (size_t i = 0; i < x.size(); ++i)
        sum += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    return a.grid().volume() * sum;
}

double parseval_defect(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    double phys = 0.0;
    for (int c = 0; c < g.components; ++c) {
        auto vals = f.to_physical(c);
        for (double v : vals) phys += v * v * g.cell_weight();
    }
    return std::abs(std::sqrt(phys) - h_norm(f));
}

SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<double(double, double)>& m) {
    const TorusGrid& g = f.grid();
    SpectralField out(g);
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1)
                out.at(c, i1, i2) = m(g.kappa(i1), g.kappa(i2)) * f.at(c, i1, i2);
    return out;
}

SpectralField derivative(const SpectralField& f, int axis) {
    const TorusGrid& g = f.grid();
    SpectralField out(g);
    const int nyq = g.n / 2;
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1) {
                if ((axis == 0 && i1 == nyq) || (axis == 1 && i2 == nyq)) continue;
                const double k = axis == 0 ? g.kappa(i1) : g.kappa(i2);
                out.at(c, i1, i2) = cplx(0.0, k) * f.at(c, i1, i2);
            }
    return out;
}

SpectralField gradient_of_component(const SpectralField& f, int comp) {
    const TorusGrid& g = f.grid();
    TorusGrid vg = g;
    vg.components = 2;
    SpectralField out(vg);
    for (int axis = 0; axis < 2; ++axis) {
        SpectralField d = derivative(f, axis);
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1)
                out.at(axis, i1, i2) = d.at(comp, i1, i2);
    }
    return out;
}

SpectralField divergence(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    if (g.components != 2)
        throw std::invalid_argument("divergence: 2-component field required");
    TorusGrid sg = g;
    sg.components = 1;
    SpectralField out(sg);
    SpectralField d0 = derivative(f, 0), d1 = derivative(f, 1);
    for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1)
            out.at(0, i1, i2) = d0.at(0, i1, i2) + d1.at(1, i1, i2);
    return out;
}

double grad_norm_sq(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    double sum = 0.0;
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < g.n; ++i2) {
            const double k2 = g.kappa(i2);
            for (int i1 = 0; i1 < g.n; ++i1) {
                const double k1 = g.kappa(i1);
                sum += (k1 * k1 + k2 * k2) * std::norm(f.at(c, i1, i2));
            }
        }
    return g.volume() * sum;
}

bool in_dealias_band(const TorusGrid& g, int i1, int i2) {
    const int band = g.dealias_band();
    return std::abs(g.freq(i1)) <= band && std::abs(g.freq(i2)) <= band;
}

void dealias(SpectralField& f) {
    const TorusGrid& g = f.grid();
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < g.n; ++i2)
            for (int i1 = 0; i1 < g.n; ++i1)
                if (!in_dealias_band(g, i1, i2))
                    f.at(c, i1, i2) = 0.0;
}

SpectralField leray_project(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    if (g.components != 2)
        throw std::invalid_argument("leray_project: 2-component field required");
    SpectralField out(g);
    for (int i2 = 0; i2 < g.n; ++i2) {
        const double k2 = g.kappa(i2);
        for (int i1 = 0; i1 < g.n; ++i1) {
            const double k1 = g.kappa(i1);
            const double ksq = k1 * k1 + k2 * k2;
            const cplx u = f.at(0, i1, i2), v = f.at(1, i1, i2);
            if (ksq == 0.0) {
                out.at(0, i1, i2) = u;
                out.at(1, i1, i2) = v;
            } else {
                const cplx kdot = (k1 * u + k2 * v) / ksq;
                out.at(0, i1, i2) = u - k1 * kdot;
                out.at(1, i1, i2) = v - k2 * kdot;
            }
        }
    }
    return out;
}

double divergence_linf(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    if (g.components != 2)
        throw std::invalid_argument("divergence_linf: 2-component field required");
    double worst = 0.0;
    for (int i2 = 0; i2 < g.n; ++i2) {
        const double k2 = g.kappa(i2);
        for (int i1 = 0; i1 < g.n; ++i1) {
            const double k1 = g.kappa(i1);
            worst = std::max(worst, std::abs(k1 * f.at(0, i1, i2) + k2 * f.at(1, i1, i2)));
        }
    }
    return worst;
}

void project_sine_odd(SpectralField& f) {
    const TorusGrid& g = f.grid();
    const int n = g.n;
    SpectralField out(g);
    for (int c = 0; c < g.components; ++c)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = (n - i1) % n, j2 = (n - i2) % n;
                out.at(c, i1, i2) = 0.25 * (f.at(c, i1, i2) - f.at(c, j1, i2) -
                                            f.at(c, i1, j2) + f.at(c, j1, j2));
            }
    f = out;
}

std::vector<double> to_physical_component(const SpectralField& f, int comp) {
    return f.to_physical(comp);
}

SpectralField from_physical_components(const TorusGrid& g,
                                       const std::vector<std::vector<double>>& comps) {
    if (comps.size() != static_cast<size_t>(g.components))
        throw std::invalid_argument("from_physical_components: wrong component count");
    std::vector<double> all;
    all.reserve(static_cast<size_t>(g.points()) * g.components);
    for (const auto& c : comps) all.insert(all.end(), c.begin(), c.end());
    return SpectralField::from_physical(g, all);
}

} // namespace ldplab
