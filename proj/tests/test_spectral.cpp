#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "spectral/field.hpp"
#include "spectral/field_io.hpp"
#include "spectral/grid.hpp"
#include "spectral/ops.hpp"
#include "spectral/transform.hpp"
#include "util/rng.hpp"

using namespace ptn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

FourierField random_field(GridPtr g, int ncomp, std::uint64_t seed) {
    RngStream rng = RngStream::root(seed);
    auto f = sample_gaussian_field(
        g, [](const std::array<int, 3>&) { return 1.0; }, ncomp, rng);
    return f;
}

// direct convolution oracle for v . grad w
FourierField brute_advect(const FourierField& v, const FourierField& w) {
    const auto& g = w.grid();
    const double pref = std::pow(2.0 * kPi, -0.5 * g.d);
    FourierField out(w.grid_ptr(), w.ncomp());
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        const auto& k = g.modes[m];
        for (int c = 0; c < w.ncomp(); ++c) {
            cplx acc = 0.0;
            for (std::size_t e = 0; e < g.nmodes(); ++e) {
                const auto& eta = g.modes[e];
                int diff = g.index_of(k[0] - eta[0], k[1] - eta[1], k[2] - eta[2]);
                if (diff < 0) continue;
                cplx dot = 0.0;
                for (int vc = 0; vc < v.ncomp(); ++vc)
                    dot += v.at(std::size_t(diff), vc) * cplx(0.0, double(eta[vc]));
                acc += dot * w.at(e, c);
            }
            out.at(m, c) = pref * acc;
        }
    }
    return out;
}

double max_diff(const FourierField& a, const FourierField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
    return m;
}

} // namespace

TEST_CASE("grid: mode set and conjugate pairing") {
    auto g = make_grid(2, 4);
    // modes 0 < |k| <= 4 in Z^2: pi*16 ~ 50; exact count 48
    CHECK(g->nmodes() == 48);
    CHECK(g->index_of(0, 0) == -1);
    CHECK(g->index_of(5, 0) == -1);
    CHECK(g->index_of(3, 3) == -1);  // |k| = sqrt(18) > 4
    for (std::size_t m = 0; m < g->nmodes(); ++m) {
        const auto& k = g->modes[m];
        const auto& mk = g->modes[g->conj[m]];
        CHECK(mk[0] == -k[0]);
        CHECK(mk[1] == -k[1]);
        CHECK(mk[2] == -k[2]);
        CHECK(g->is_positive(m) != g->is_positive(g->conj[m]));
    }
    CHECK(g->M >= 3 * g->K + 1);
}

TEST_CASE("leray: hand value d=3, k=(1,1,0)") {
    auto g = make_grid(3, 2);
    FourierField u(g, 3);
    int m = g->index_of(1, 1, 0);
    REQUIRE(m >= 0);
    u.at(std::size_t(m), 0) = 1.0;
    u.at(std::size_t(g->conj[std::size_t(m)]), 0) = 1.0;  // keep it Hermitian
    auto p = leray_project(u);
    CHECK(std::abs(p.at(std::size_t(m), 0) - cplx(0.5)) < 1e-14);
    CHECK(std::abs(p.at(std::size_t(m), 1) - cplx(-0.5)) < 1e-14);
    CHECK(std::abs(p.at(std::size_t(m), 2)) < 1e-14);
}

TEST_CASE("leray: idempotent, annihilates gradients, divergence-free output") {
    auto g = make_grid(3, 3);
    auto u = random_field(g, 3, 11);
    auto p = leray_project(u);
    auto pp = leray_project(p);
    CHECK(max_diff(p, pp) < 1e-12);
    CHECK(p.divergence_defect() < 1e-12);

    // gradient field: uhat(k) = i k ghat(k)
    auto s = random_field(g, 1, 12);
    FourierField grad(g, 3);
    for (std::size_t m = 0; m < g->nmodes(); ++m)
        for (int c = 0; c < 3; ++c)
            grad.at(m, c) = cplx(0.0, double(g->modes[m][c])) * s.at(m, 0);
    auto pg = leray_project(grad);
    CHECK(sobolev_norm(pg, 0.0) < 1e-12);
}

TEST_CASE("fractional laplacian: multiplier arithmetic and composition") {
    auto g = make_grid(2, 4);
    FourierField u(g, 1);
    int m = g->index_of(2, 0);
    REQUIRE(m >= 0);
    u.at(std::size_t(m)) = 1.0;
    u.at(std::size_t(g->conj[std::size_t(m)])) = 1.0;
    auto v = apply_fractional_laplacian(u, -0.5);
    CHECK(std::abs(v.at(std::size_t(m)) - cplx(0.5)) < 1e-15);  // |k|^{-1} = 1/2

    auto w = random_field(g, 1, 13);
    auto back = apply_fractional_laplacian(apply_fractional_laplacian(w, 0.7), -0.7);
    CHECK(max_diff(w, back) < 1e-12);
}

TEST_CASE("parseval: spectral L2 norm equals physical quadrature") {
    for (int d : {2, 3}) {
        auto g = make_grid(d, d == 2 ? 6 : 4);
        auto u = random_field(g, 1, 14 + std::uint64_t(d));
        std::vector<double> phys;
        to_physical(u, 0, phys);
        double cell = std::pow(2.0 * kPi / g->M, d);
        double q = 0.0;
        for (double x : phys) q += x * x;
        q = std::sqrt(cell * q);
        CHECK(sobolev_norm(u, 0.0) == doctest::Approx(q).epsilon(1e-10));
    }
}

TEST_CASE("transform: roundtrip is exact on band-limited data") {
    auto g = make_grid(2, 8);
    auto u = random_field(g, 1, 15);
    std::vector<double> phys;
    to_physical(u, 0, phys);
    FourierField v(g, 1);
    from_physical(phys, v, 0);
    CHECK(max_diff(u, v) < 1e-12);
}

TEST_CASE("besov: single dyadic block reduces to 2^{js} ||f||_L2") {
    auto g = make_grid(2, 8);
    auto u = random_field(g, 1, 16);
    // keep only the block 2 <= |k| < 4  (j = 1)
    for (std::size_t m = 0; m < g->nmodes(); ++m) {
        double ak = std::sqrt(g->k2(m));
        if (!(ak >= 2.0 && ak < 4.0)) u.at(m) = 0.0;
    }
    double l2 = sobolev_norm(u, 0.0);
    for (double p : {1.0, 2.0, 4.0})
        CHECK(besov_norm(u, 0.8, p) == doctest::Approx(std::pow(2.0, 0.8) * l2).epsilon(1e-12));
}

TEST_CASE("besov: p=2 comparable to Sobolev within 2^{|s|}") {
    auto g = make_grid(2, 8);
    auto u = random_field(g, 1, 17);
    for (double s : {-1.0, 0.5, 1.5}) {
        double ratio = besov_norm(u, s, 2.0) / sobolev_norm(u, s);
        CHECK(ratio <= std::pow(2.0, std::abs(s)) + 1e-12);
        CHECK(ratio >= std::pow(2.0, -std::abs(s)) - 1e-12);
    }
}

TEST_CASE("advect agrees with the direct convolution oracle") {
    SUBCASE("scalar d=2") {
        auto g = make_grid(2, 5);
        auto v = leray_project(random_field(g, 2, 18));
        auto w = random_field(g, 1, 19);
        CHECK(max_diff(advect(v, w), brute_advect(v, w)) < 1e-12);
    }
    SUBCASE("vector d=3") {
        auto g = make_grid(3, 3);
        auto v = leray_project(random_field(g, 3, 20));
        auto w = random_field(g, 3, 21);
        CHECK(max_diff(advect(v, w), brute_advect(v, w)) < 1e-12);
    }
}

TEST_CASE("nonlinear cancellation: <Pi(u.grad u), u> = 0") {
    auto g = make_grid(3, 4);
    auto u = leray_project(random_field(g, 3, 22));
    auto nl = leray_project(advect(u, u));
    double scale = sobolev_norm(u, 0.0);
    CHECK(std::abs(l2_inner(nl, u)) < 1e-10 * scale * scale * scale);
}

TEST_CASE("sample_gaussian_field: per-mode variance and symmetry") {
    auto g = make_grid(2, 3);
    RngStream rng = RngStream::root(23);
    auto stdfn = [](const std::array<int, 3>& k) {
        return std::pow(double(k[0] * k[0] + k[1] * k[1]), -0.5);
    };
    const int reps = 4000;
    std::vector<double> acc(g->nmodes(), 0.0);
    for (int r = 0; r < reps; ++r) {
        auto f = sample_gaussian_field(g, stdfn, 1, rng);
        CHECK(f.hermitian_defect() < 1e-14);
        for (std::size_t m = 0; m < g->nmodes(); ++m) acc[m] += std::norm(f.at(m));
    }
    for (std::size_t m = 0; m < g->nmodes(); ++m) {
        double want = std::pow(stdfn(g->modes[m]), 2);
        double got = acc[m] / reps;
        // E|uhat|^2 = std^2; SE of the mean of |uhat|^2 is std^2 sqrt(2/reps)... use 4 SE
        CHECK(std::abs(got - want) < 4.0 * want * std::sqrt(2.0 / reps));
    }
}

TEST_CASE("field io: roundtrip and validation") {
    auto g = make_grid(3, 3);
    auto u = leray_project(random_field(g, 3, 24));
    auto doc = field_to_json(u);
    auto back = field_from_json(doc);
    CHECK(back.grid().d == 3);
    CHECK(back.grid().K == 3);
    CHECK(max_diff(u, back) == 0.0);

    const char* path = "io_roundtrip_test.json";
    save_field(u, path);
    auto loaded = load_field(path);
    CHECK(max_diff(u, loaded) < 1e-14);
    std::remove(path);

    auto broken = doc;
    broken["coeffs"][0][4] = double(broken["coeffs"][0][4]) + 1.0;  // break symmetry
    CHECK_THROWS(field_from_json(broken));
}
