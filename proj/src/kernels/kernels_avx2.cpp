#include "kernels/kernels.hpp"

#include <immintrin.h>

namespace ptn::kernels::detail {
namespace {

// Layout: std::complex<double> is [re, im], so a __m256d holds two elements.

inline __m256d dup_weights(const double* w) {
    // [w0, w1] -> [w0, w0, w1, w1]
    __m128d lo = _mm_loaddup_pd(w);
    __m128d hi = _mm_loaddup_pd(w + 1);
    return _mm256_set_m128d(hi, lo);
}

void scale_real_avx2(cplx* x, const double* w, std::size_t n) {
    auto* p = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(v, dup_weights(w + i)));
    }
    if (i < n) x[i] *= w[i];
}

void axpy_avx2(cplx* y, double a, const cplx* x, std::size_t n) {
    auto* py = reinterpret_cast<double*>(y);
    const auto* px = reinterpret_cast<const double*>(x);
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        __m256d vy = _mm256_loadu_pd(py + 2 * i);
        __m256d vx = _mm256_loadu_pd(px + 2 * i);
        _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    if (i < n) y[i] += a * x[i];
}

double weighted_abs2_avx2(const cplx* x, const double* w, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    // acc lanes: [even-index sum, 0, odd-index sum, 0]
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        __m256d v = _mm256_loadu_pd(px + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        // [re0^2+im0^2, ., re1^2+im1^2, .]
        __m256d nrm = _mm256_hadd_pd(sq, sq);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(nrm, dup_weights(w + i)));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double acc0 = lanes[0], acc1 = lanes[2];
    if (i < n) acc0 += w[i] * std::norm(x[i]);
    return acc0 + acc1;
}

double abs2_sum_avx2(const cplx* x, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
        __m256d v = _mm256_loadu_pd(px + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        acc = _mm256_add_pd(acc, _mm256_hadd_pd(sq, sq));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double acc0 = lanes[0], acc1 = lanes[2];
    if (i < n) acc0 += std::norm(x[i]);
    return acc0 + acc1;
}

} // namespace

const Ops* avx2_ops() {
    static const Ops ops{scale_real_avx2, axpy_avx2, weighted_abs2_avx2, abs2_sum_avx2};
    return &ops;
}

} // namespace ptn::kernels::detail
