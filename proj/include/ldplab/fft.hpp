#pragma once

#include <complex>

namespace ldplab {

// Thin wrapper around FFTW double-precision c2c transforms with a cached
// plan per grid size. Plan creation is serialized behind a mutex; execution
// is thread-safe (new-array execute on unaligned-tolerant plans).
//
// Coefficient convention: u(x) = sum_k uhat(k) e^{i kappa(k).x}, so the
// forward transform divides by n*n.

// phys: n*n real samples, row-major (row = x2 index, col = x1 index).
// coeffs: n*n complex, same layout, index i in [0,n) maps to signed
// frequency i <= n/2 ? i : i-n.
void fft_forward(int n, const double* phys, std::complex<double>* coeffs);
void fft_backward(int n, const std::complex<double>* coeffs, double* phys);

} // namespace ldplab
