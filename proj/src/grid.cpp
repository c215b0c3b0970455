#include "ldplab/grid.hpp"

#include "ldplab/fft.hpp"
#include "ldplab/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldplab {

double TorusGrid::kappa(int i) const {
    return 2.0 * std::numbers::pi * freq(i) / period;
}

TorusGrid TorusGrid::make(int n, double period, int components) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("TorusGrid: modes per dimension must be even and >= 4");
    if (!(period > 0))
        throw std::invalid_argument("TorusGrid: period must be positive");
    if (components < 1)
        throw std::invalid_argument("TorusGrid: components must be positive");
    TorusGrid g;
    g.n = n;
    g.period = period;
    g.components = components;
    return g;
}

SpectralField::SpectralField(const TorusGrid& grid)
    : grid_(grid), coeffs_(grid.total_coeffs(), cplx(0.0, 0.0)) {}

SpectralField SpectralField::from_physical(const TorusGrid& grid, const std::vector<double>& values) {
    if (values.size() != static_cast<size_t>(grid.points()) * grid.components)
        throw std::invalid_argument("from_physical: value count does not match grid");
    SpectralField f(grid);
    for (int c = 0; c < grid.components; ++c)
        fft_forward(grid.n, values.data() + static_cast<size_t>(c) * grid.points(),
                    f.coeffs_.data() + static_cast<size_t>(c) * grid.coeffs_per_component());
    f.enforce_hermitian();
    return f;
}

SpectralField SpectralField::constant(const TorusGrid& grid, const std::vector<double>& value) {
    if (value.size() != static_cast<size_t>(grid.components))
        throw std::invalid_argument("constant: one value per component required");
    SpectralField f(grid);
    for (int c = 0; c < grid.components; ++c)
        f.at(c, 0, 0) = value[c];
    return f;
}

void SpectralField::set_mode(int comp, int f1, int f2, cplx a) {
    const int i1 = grid_.index_of_freq(f1), i2 = grid_.index_of_freq(f2);
    const int j1 = grid_.index_of_freq(grid_.freq((grid_.n - i1) % grid_.n));
    const int j2 = grid_.index_of_freq(grid_.freq((grid_.n - i2) % grid_.n));
    if (i1 == j1 && i2 == j2) {
        coeffs_[index(comp, i1, i2)] = cplx(a.real(), 0.0);
        return;
    }
    coeffs_[index(comp, i1, i2)] = a;
    coeffs_[index(comp, j1, j2)] = std::conj(a);
}

std::vector<double> SpectralField::to_physical(int comp) const {
    std::vector<double> out(grid_.points());
    fft_backward(grid_.n, coeffs_.data() + static_cast<size_t>(comp) * grid_.coeffs_per_component(),
                 out.data());
    return out;
}

std::vector<double> SpectralField::to_physical() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(grid_.points()) * grid_.components);
    for (int c = 0; c < grid_.components; ++c) {
        auto part = to_physical(c);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    const int n = grid_.n;
    for (int c = 0; c < grid_.components; ++c)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = (n - i1) % n, j2 = (n - i2) % n;
                worst = std::max(worst,
                                 std::abs(coeffs_[index(c, i1, i2)] -
                                          std::conj(coeffs_[index(c, j1, j2)])));
            }
    return worst;
}

void SpectralField::enforce_hermitian() {
    const int n = grid_.n;
    for (int c = 0; c < grid_.components; ++c)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = (n - i1) % n, j2 = (n - i2) % n;
                const size_t a = index(c, i1, i2), b = index(c, j1, j2);
                if (a > b) continue;
                if (a == b) {
                    coeffs_[a] = cplx(coeffs_[a].real(), 0.0);
                } else {
                    const cplx avg = 0.5 * (coeffs_[a] + std::conj(coeffs_[b]));
                    coeffs_[a] = avg;
                    coeffs_[b] = std::conj(avg);
                }
            }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

SpectralField random_field(const TorusGrid& grid, const RandomFieldSpec& spec) {
    SpectralField f(grid);
    const int band = spec.band < 0 ? grid.dealias_band() : spec.band;
    for (int c = 0; c < grid.components; ++c)
        for (int f2 = -band; f2 <= band; ++f2)
            for (int f1 = -band; f1 <= band; ++f1) {
                // fill a half-space; set_mode mirrors the conjugate
                if (f2 < 0 || (f2 == 0 && f1 < 0)) continue;
                if (spec.zero_mean && f1 == 0 && f2 == 0) continue;
                const double k1 = 2.0 * std::numbers::pi * f1 / grid.period;
                const double k2 = 2.0 * std::numbers::pi * f2 / grid.period;
                const double amp =
                    spec.amplitude * std::pow(1.0 + k1 * k1 + k2 * k2, -0.5 * spec.decay);
                const uint64_t key = (static_cast<uint64_t>(c) << 40) ^
                                     (static_cast<uint64_t>(static_cast<uint32_t>(f1 + band)) << 20) ^
                                     static_cast<uint64_t>(static_cast<uint32_t>(f2 + band));
                const double re = counter_gaussian(spec.seed, key, 0);
                const double im = counter_gaussian(spec.seed, key, 1);
                f.set_mode(c, f1, f2, amp * cplx(re, im) / std::sqrt(2.0));
            }
    return f;
}

} // namespace ldplab
