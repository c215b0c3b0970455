#include "ldplab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace ldplab {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

// FFTW_UNALIGNED lets us run the cached plan on arbitrary heap buffers.
PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> a(static_cast<size_t>(n) * n), b(a.size());
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(n, n,
                             reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_2d(n, n,
                             reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

} // namespace

void fft_forward(int n, const double* phys, std::complex<double>* coeffs) {
    const size_t m = static_cast<size_t>(n) * n;
    std::vector<std::complex<double>> in(m);
    for (size_t i = 0; i < m; ++i) in[i] = phys[i];
    PlanPair& p = plans_for(n);
    fftw_execute_dft(p.fwd,
                     reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(coeffs));
    const double scale = 1.0 / static_cast<double>(m);
    for (size_t i = 0; i < m; ++i) coeffs[i] *= scale;
}

void fft_backward(int n, const std::complex<double>* coeffs, double* phys) {
    const size_t m = static_cast<size_t>(n) * n;
    std::vector<std::complex<double>> in(coeffs, coeffs + m), out(m);
    PlanPair& p = plans_for(n);
    fftw_execute_dft(p.bwd,
                     reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (size_t i = 0; i < m; ++i) phys[i] = out[i].real();
}

} // namespace ldplab
