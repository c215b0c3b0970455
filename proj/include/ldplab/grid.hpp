#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ldplab {

using cplx = std::complex<double>;

/// Uniform periodic grid on the 2D torus [0, period)^2 with n x n points
/// per component. Fields with `components == 2` are vector-valued
/// (velocities, two-species concentrations); `components == 1` is scalar.
struct TorusGrid {
    int n = 0;           ///< points (= retained modes) per dimension, even, >= 4
    double period = 0;   ///< side length
    int components = 1;

    static TorusGrid make(int n, double period, int components);

    double dx() const { return period / n; }
    double cell_weight() const { return dx() * dx(); }
    double volume() const { return period * period; }
    int points() const { return n * n; }
    size_t coeffs_per_component() const { return static_cast<size_t>(n) * n; }
    size_t total_coeffs() const { return coeffs_per_component() * components; }

    /// Signed integer frequency of index i in [0, n).
    int freq(int i) const { return i <= n / 2 ? i : i - n; }
    /// Physical wavenumber 2*pi*freq/period.
    double kappa(int i) const;
    /// Index of signed frequency f (f in [-n/2, n/2]).
    int index_of_freq(int f) const { return f >= 0 ? f : f + n; }
    /// Largest signed frequency kept by the 2/3 dealiasing rule.
    int dealias_band() const { return n / 3; }

    bool operator==(const TorusGrid&) const = default;
};

/// Real vector-valued function on a TorusGrid stored as Fourier
/// coefficients. Layout: component-major, then row-major over (k2, k1)
/// index pairs. Real-valuedness is the Hermitian symmetry
/// coeff(-k) = conj(coeff(k)); every constructor and operation here
/// preserves it.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const TorusGrid& grid);  // zero field

    static SpectralField from_physical(const TorusGrid& grid, const std::vector<double>& values);
    static SpectralField constant(const TorusGrid& grid, const std::vector<double>& value_per_component);

    const TorusGrid& grid() const { return grid_; }
    bool empty() const { return coeffs_.empty(); }

    cplx& at(int comp, int i1, int i2) { return coeffs_[index(comp, i1, i2)]; }
    const cplx& at(int comp, int i1, int i2) const { return coeffs_[index(comp, i1, i2)]; }
    /// Coefficient addressed by signed frequencies.
    const cplx& mode(int comp, int f1, int f2) const {
        return coeffs_[index(comp, grid_.index_of_freq(f1), grid_.index_of_freq(f2))];
    }
    /// Sets the mode at (f1,f2) and its mirror so the field stays real.
    /// Self-conjugate modes (k = -k) keep only the real part of `a`.
    void set_mode(int comp, int f1, int f2, cplx a);

    std::vector<cplx>& data() { return coeffs_; }
    const std::vector<cplx>& data() const { return coeffs_; }

    /// Physical samples of one component (row-major, row = x2 index).
    std::vector<double> to_physical(int comp) const;
    /// All components concatenated.
    std::vector<double> to_physical() const;

    /// Largest deviation from Hermitian symmetry (diagnostic).
    double hermitian_defect() const;
    /// Projects onto exactly Hermitian coefficients (roundoff hygiene).
    void enforce_hermitian();

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

    void axpy(double a, const SpectralField& x);  // this += a*x

    size_t index(int comp, int i1, int i2) const {
        return (static_cast<size_t>(comp) * grid_.n + i2) * grid_.n + i1;
    }

private:
    TorusGrid grid_;
    std::vector<cplx> coeffs_;
};

/// Deterministic random fields for tests and sampling. Coefficients are
/// Gaussian with amplitude decay (1+|kappa|^2)^(-decay/2), restricted to
/// signed frequencies |f_i| <= band. Pure function of (grid, seed).
struct RandomFieldSpec {
    uint64_t seed = 1;
    double amplitude = 1.0;
    double decay = 2.0;
    int band = -1;          ///< -1 = dealias band
    bool zero_mean = false;
};
SpectralField random_field(const TorusGrid& grid, const RandomFieldSpec& spec);

} // namespace ldplab
