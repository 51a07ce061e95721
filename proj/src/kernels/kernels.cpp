#include "kernels/kernels.hpp"

namespace ptn::kernels {

#if !PTN_HAVE_AVX2_TU
namespace detail {
const Ops* avx2_ops() { return nullptr; }
} // namespace detail
#endif

namespace {

const detail::Ops& select() {
    static const detail::Ops& chosen = []() -> const detail::Ops& {
#if PTN_HAVE_AVX2_TU
        if (__builtin_cpu_supports("avx2"))
            return *detail::avx2_ops();
#endif
        return detail::scalar_ops();
    }();
    return chosen;
}

} // namespace

void scale_real(cplx* x, const double* w, std::size_t n) { select().scale_real(x, w, n); }
void axpy(cplx* y, double a, const cplx* x, std::size_t n) { select().axpy(y, a, x, n); }
double weighted_abs2(const cplx* x, const double* w, std::size_t n) { return select().weighted_abs2(x, w, n); }
double abs2_sum(const cplx* x, std::size_t n) { return select().abs2_sum(x, n); }

const char* backend() {
    return &select() == &detail::scalar_ops() ? "scalar" : "avx2";
}

} // namespace ptn::kernels
