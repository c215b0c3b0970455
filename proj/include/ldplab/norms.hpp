#pragma once

#include "ldplab/grid.hpp"

#include <functional>

namespace ldplab {

// Interpolation-scale norms on the torus, realized as diagonal Fourier
// multipliers: ||u||_theta^2 = vol * sum_k (1+|kappa|^2)^(2*theta-1) |uhat_k|^2.
// theta = 1/2 is the L^2 (pivot) norm, theta = 1 the H^1-type norm,
// theta = 0 the dual norm.

/// ||field||_{V_theta}; theta outside [0,1] is a domain error.
double norm_theta(const SpectralField& f, double theta);

inline double h_norm(const SpectralField& f) { return norm_theta(f, 0.5); }
inline double v_norm(const SpectralField& f) { return norm_theta(f, 1.0); }
inline double vstar_norm(const SpectralField& f) { return norm_theta(f, 0.0); }

/// ||v||_theta - ||v||_{V*}^(1-theta) ||v||_V^theta. Never positive beyond
/// roundoff; equality for single modes. Zero field is a degenerate input.
double verify_interpolation(const SpectralField& f, double theta);

/// Duality pairing <a, b> = vol * sum_k Re(conj(ahat) bhat); coincides with
/// the physical-space L^2 inner product for real fields.
double pair_duality(const SpectralField& a, const SpectralField& b);

/// |physical-quadrature L^2 norm - coefficient-space norm| (Parseval check).
double parseval_defect(const SpectralField& f);

// ---- diagonal operators -------------------------------------------------

/// Applies a scalar multiplier m(kappa1, kappa2) to every component.
SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<double(double, double)>& m);

/// Partial derivative along axis (0 or 1). The Nyquist row/column is zeroed
/// (its derivative multiplier has no consistent sign).
SpectralField derivative(const SpectralField& f, int axis);

/// (grad u)_j for a scalar component: returns a 2-component field with
/// entries d(u_c)/dx_j for fixed component c.
SpectralField gradient_of_component(const SpectralField& f, int comp);

/// For a 2-component field: d1 u1 + d2 u2 (1-component result).
SpectralField divergence(const SpectralField& f);

double grad_norm_sq(const SpectralField& f);  ///< sum_c ||grad u_c||_{L^2}^2

/// Zeroes all modes outside the 2/3 band (|f_i| <= n/3 per dimension).
void dealias(SpectralField& f);
bool in_dealias_band(const TorusGrid& g, int i1, int i2);

/// Per-mode orthogonal projection onto divergence-free 2-component fields
/// (identity at k = 0). Idempotent and self-adjoint.
SpectralField leray_project(const SpectralField& f);

/// Largest |i kappa . uhat(k)| over modes: spectral divergence residual.
double divergence_linf(const SpectralField& f);

/// Projects onto the subspace odd under each reflection x_j -> -x_j
/// (double sine series): the homogeneous-Dirichlet square realized by odd
/// extension to the torus.
void project_sine_odd(SpectralField& f);

/// param-free pointwise product helpers (physical space, fresh transforms).
/// Inputs are used as-is; callers dealias before/after as appropriate.
std::vector<double> to_physical_component(const SpectralField& f, int comp);
SpectralField from_physical_components(const TorusGrid& g, const std::vector<std::vector<double>>& comps);

} // namespace ldplab
