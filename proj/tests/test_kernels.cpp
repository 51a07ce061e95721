#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kernels/kernels.hpp"
#include "util/rng.hpp"

using namespace ptn;
using kernels::cplx;

namespace {

std::vector<cplx> random_cplx(std::size_t n, std::uint64_t seed) {
    RngStream rng = RngStream::root(seed);
    std::vector<cplx> v(n);
    for (auto& z : v) {
        double a, b;
        rng.normal_pair(a, b);
        z = {a, b};
    }
    return v;
}

std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
    RngStream rng = RngStream::root(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

} // namespace

TEST_CASE("dispatch reports a known backend") {
    const char* be = kernels::backend();
    CHECK((std::string(be) == "avx2" || std::string(be) == "scalar"));
}

TEST_CASE("scale_real reference behaviour") {
    auto x = random_cplx(17, 1);
    auto w = random_real(17, 2);
    auto y = x;
    kernels::scale_real(y.data(), w.data(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y[i] == x[i] * w[i]);
}

TEST_CASE("axpy reference behaviour") {
    auto x = random_cplx(23, 3);
    auto y0 = random_cplx(23, 4);
    auto y = y0;
    kernels::axpy(y.data(), 0.75, x.data(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] - (y0[i] + 0.75 * x[i])) < 1e-15);
}

TEST_CASE("abs2_sum and weighted_abs2 agree with direct loops") {
    auto x = random_cplx(101, 5);
    auto w = random_real(101, 6);
    double s = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::norm(x[i]);
        sw += w[i] * std::norm(x[i]);
    }
    CHECK(kernels::abs2_sum(x.data(), x.size()) == doctest::Approx(s).epsilon(1e-13));
    CHECK(kernels::weighted_abs2(x.data(), w.data(), x.size()) ==
          doctest::Approx(sw).epsilon(1e-13));
}

TEST_CASE("scalar and avx2 backends agree to round-off") {
    const auto& ref = kernels::detail::scalar_ops();
    const auto* simd = kernels::detail::avx2_ops();
    if (!simd) {
        MESSAGE("avx2 backend not compiled in; skipping equivalence check");
        return;
    }
    // odd sizes exercise the vector tail paths
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 1000u, 1001u}) {
        auto x = random_cplx(n, 100 + n);
        auto w = random_real(n, 200 + n);

        auto a = x, b = x;
        ref.scale_real(a.data(), w.data(), n);
        simd->scale_real(b.data(), w.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);

        auto ya = random_cplx(n, 300 + n), yb = ya;
        ref.axpy(ya.data(), -1.25, x.data(), n);
        simd->axpy(yb.data(), -1.25, x.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(ya[i] - yb[i]) <= 1e-15 * (1.0 + std::abs(ya[i])));

        double sa = ref.abs2_sum(x.data(), n);
        double sb = simd->abs2_sum(x.data(), n);
        CHECK(sa == doctest::Approx(sb).epsilon(1e-13));

        double wa = ref.weighted_abs2(x.data(), w.data(), n);
        double wb = simd->weighted_abs2(x.data(), w.data(), n);
        CHECK(wa == doctest::Approx(wb).epsilon(1e-13));
    }
}

TEST_CASE("fixed summation order: repeated calls are bit-identical") {
    auto x = random_cplx(777, 9);
    auto w = random_real(777, 10);
    double s1 = kernels::weighted_abs2(x.data(), w.data(), x.size());
    double s2 = kernels::weighted_abs2(x.data(), w.data(), x.size());
    CHECK(s1 == s2);
    double a1 = kernels::abs2_sum(x.data(), x.size());
    double a2 = kernels::abs2_sum(x.data(), x.size());
    CHECK(a1 == a2);
}
