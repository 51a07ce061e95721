#include "kernels/kernels.hpp"

namespace ptn::kernels::detail {
namespace {

void scale_real_ref(cplx* x, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= w[i];
}

void axpy_ref(cplx* y, double a, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double weighted_abs2_ref(const cplx* x, const double* w, std::size_t n) {
    // Two interleaved accumulators, matching the AVX2 lane layout.
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        acc0 += w[i] * std::norm(x[i]);
        acc1 += w[i + 1] * std::norm(x[i + 1]);
    }
    if (i < n) acc0 += w[i] * std::norm(x[i]);
    return acc0 + acc1;
}

double abs2_sum_ref(const cplx* x, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        acc0 += std::norm(x[i]);
        acc1 += std::norm(x[i + 1]);
    }
    if (i < n) acc0 += std::norm(x[i]);
    return acc0 + acc1;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{scale_real_ref, axpy_ref, weighted_abs2_ref, abs2_sum_ref};
    return ops;
}

} // namespace ptn::kernels::detail
