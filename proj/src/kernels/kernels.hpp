#pragma once
#include <complex>
#include <cstddef>

// Hot inner loops over packed complex spectral coefficients.  Every entry
// point has a portable reference implementation and (on x86-64) an AVX2
// variant; the active backend is chosen once at runtime from CPUID.  Both
// backends use a fixed summation order, so results are reproducible run to
// run on a given machine; cross-backend agreement to round-off is unit-tested.

namespace ptn::kernels {

using cplx = std::complex<double>;

// x[i] *= w[i]
void scale_real(cplx* x, const double* w, std::size_t n);
// y[i] += a * x[i]
void axpy(cplx* y, double a, const cplx* x, std::size_t n);
// sum_i w[i] * |x[i]|^2
double weighted_abs2(const cplx* x, const double* w, std::size_t n);
// sum_i |x[i]|^2
double abs2_sum(const cplx* x, std::size_t n);

const char* backend();       // "avx2" or "scalar"

namespace detail {
struct Ops {
    void (*scale_real)(cplx*, const double*, std::size_t);
    void (*axpy)(cplx*, double, const cplx*, std::size_t);
    double (*weighted_abs2)(const cplx*, const double*, std::size_t);
    double (*abs2_sum)(const cplx*, std::size_t);
};
const Ops& scalar_ops();
const Ops* avx2_ops();       // nullptr when not compiled in
} // namespace detail

} // namespace ptn::kernels
