#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "limits/limits.hpp"
#include "noise/corrector.hpp"
#include "spectral/ops.hpp"
#include "util/rng.hpp"

using namespace ptn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

FourierField random_field(GridPtr g, int ncomp, std::uint64_t seed) {
    RngStream rng = RngStream::root(seed);
    return sample_gaussian_field(
        g, [](const std::array<int, 3>& k) {
            return std::exp(-0.4 * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
        },
        ncomp, rng);
}

// u = A cos(k.x) e with e . k = 0: u.grad u vanishes identically.
FourierField shear_field(GridPtr g, const std::array<int, 3>& k,
                         const Eigen::Vector3d& e, double A) {
    FourierField u(g, g->d);
    int m = g->index_of(k);
    REQUIRE(m >= 0);
    double c = 0.5 * A * std::pow(2.0 * kPi, 0.5 * g->d);
    for (int comp = 0; comp < g->d; ++comp) {
        u.at(std::size_t(m), comp) = c * e[comp];
        u.at(g->conj[std::size_t(m)], comp) = c * e[comp];
    }
    return u;
}

} // namespace

TEST_CASE("fractional heat: multiplier, semigroup, commutation") {
    auto g = make_grid(2, 6);
    auto u = random_field(g, 1, 1);

    auto id = fractional_heat(u, 1.0, 0.3, 0.0);
    CHECK(id.raw() == u.raw());

    // nu=1, a=0, |k|=1, t=1: factor e^{-1}
    int m = g->index_of(1, 0);
    auto v = fractional_heat(u, 1.0, 0.0, 1.0);
    CHECK(std::abs(v.at(std::size_t(m)) - u.at(std::size_t(m)) * std::exp(-1.0)) < 1e-15);

    auto two = fractional_heat(fractional_heat(u, 0.7, 0.25, 0.4), 0.7, 0.25, 0.6);
    auto one = fractional_heat(u, 0.7, 0.25, 1.0);
    for (std::size_t i = 0; i < u.raw().size(); ++i)
        CHECK(std::abs(two.raw()[i] - one.raw()[i]) < 1e-12);

    auto c1 = fractional_heat(apply_fractional_laplacian(u, 0.5), 0.7, 0.25, 0.3);
    auto c2 = apply_fractional_laplacian(fractional_heat(u, 0.7, 0.25, 0.3), 0.5);
    for (std::size_t i = 0; i < u.raw().size(); ++i)
        CHECK(std::abs(c1.raw()[i] - c2.raw()[i]) < 1e-12);
}

TEST_CASE("ou step: exact mean decay and stationary variance") {
    auto g = make_grid(2, 3);
    const double nu = 1.0, a = 0.0, b = 0.0;
    int m = g->index_of(1, 0);

    // mean factor 1/2 at dt = ln 2 for |k| = 1
    const int reps = 4000;
    RngStream rng = RngStream::root(77);
    cplx mean = 0.0;
    FourierField init = random_field(g, 1, 3);
    for (int r = 0; r < reps; ++r) {
        auto st = init;
        ou_exact_step(st, nu, a, b, std::log(2.0), rng);
        mean += st.at(std::size_t(m));
    }
    mean /= double(reps);
    // injected std at |k|=1, dt=ln2: sqrt(1 - 1/4); SE of the complex mean
    double se = std::sqrt(0.75 / reps);
    CHECK(std::abs(mean - 0.5 * init.at(std::size_t(m))) < 5.0 * se);

    // started from the stationary law, per-mode variance is |k|^{-2(a+2b)}
    const double a2 = 0.25, b2 = 0.1;
    auto stat_std = [&](const std::array<int, 3>& k) {
        double k2 = double(k[0] * k[0] + k[1] * k[1]);
        return std::pow(k2, -0.5 * (a2 + 2 * b2));
    };
    std::vector<double> acc(g->nmodes(), 0.0);
    const int reps2 = 3000;
    for (int r = 0; r < reps2; ++r) {
        auto st = sample_gaussian_field(g, stat_std, 1, rng);
        ou_exact_step(st, nu, a2, b2, 0.37, rng);
        ou_exact_step(st, nu, a2, b2, 0.63, rng);
        for (std::size_t mm = 0; mm < g->nmodes(); ++mm) acc[mm] += std::norm(st.at(mm));
    }
    for (std::size_t mm = 0; mm < g->nmodes(); ++mm) {
        double want = std::pow(stat_std(g->modes[mm]), 2);
        CHECK(std::abs(acc[mm] / reps2 - want) < 4.5 * want * std::sqrt(2.0 / reps2));
    }
}

TEST_CASE("hyperviscous run: linear data matches the exact multiplier") {
    auto g = make_grid(3, 4);
    LimitRunConfig cfg;
    cfg.grid = g;
    cfg.init = shear_field(g, {0, 0, 2}, {1.0, 0.5, 0.0}, 1.0);
    cfg.diss_coeff = 0.6;
    cfg.a = 0.25;
    cfg.kappa = 0.3;
    cfg.dt = 1e-3;
    cfg.T = 0.2;
    auto tr = hyperviscous_ns(cfg);
    CHECK(tr.failed_step == -1);
    int m = g->index_of(0, 0, 2);
    double k2 = 4.0;
    double lam = cfg.kappa * k2 + cfg.diss_coeff * std::pow(k2, 1.0 + cfg.a);
    cplx want = cfg.init.at(std::size_t(m), 0) * std::exp(-lam * cfg.T);
    CHECK(std::abs(tr.final_state.at(std::size_t(m), 0) - want) <
          1e-10 * std::abs(cfg.init.at(std::size_t(m), 0)));
    // the nonlinearity self-cancels on shear data: nothing leaks to other modes
    double off = 0.0;
    for (std::size_t mm = 0; mm < g->nmodes(); ++mm) {
        if (mm == std::size_t(m) || mm == g->conj[std::size_t(m)]) continue;
        for (int c = 0; c < 3; ++c) off = std::max(off, std::abs(tr.final_state.at(mm, c)));
    }
    CHECK(off < 1e-12);
    CHECK(tr.final_state.divergence_defect() < 1e-10);
}

TEST_CASE("hyperviscous run: zero data stays zero; guard works") {
    auto g = make_grid(3, 4);
    LimitRunConfig cfg;
    cfg.grid = g;
    cfg.init = FourierField(g, 3);
    cfg.dt = 1e-2;
    cfg.T = 0.1;
    auto tr = hyperviscous_ns(cfg);
    CHECK(sobolev_norm(tr.final_state, 0.0) == 0.0);
}

TEST_CASE("damped euler: shear data decays exactly like e^{-nu t}") {
    auto g = make_grid(3, 4);
    LimitRunConfig cfg;
    cfg.grid = g;
    cfg.init = shear_field(g, {1, 0, 0}, {0.0, 1.0, 0.3}, 0.8);
    cfg.nu_damp = 0.5;
    cfg.dt = 1e-3;
    cfg.T = 1.0;
    cfg.record_s = {3.0};
    auto tr = damped_euler(cfg);
    CHECK(tr.failed_step == -1);
    double n0 = sobolev_norm(cfg.init, 3.0);
    double nT = tr.norms.back()[0];
    CHECK(std::abs(nT - n0 * std::exp(-cfg.nu_damp * cfg.T)) < 1e-8 * n0);
}

TEST_CASE("second-moment system: rates match the corrector diagonal") {
    NoiseParams p;
    p.d = 2;
    p.N = 3;
    p.a = 0.25;
    p.nu = 0.9;
    auto ens = build_noise_ensemble(p);
    auto g = make_grid(2, 6);
    auto sys = build_second_moment_system(ens, g);
    for (std::size_t m = 0; m < g->nmodes(); ++m) {
        CHECK(sys.S[m] >= 0.0);
        CHECK(std::abs(sys.S[m] + 2.0 * corrector_scalar(ens, g->modes[m])) < 1e-10);
        for (const auto& [j, c] : sys.coupling[m]) CHECK(c >= 0.0);
    }
}

TEST_CASE("moment ode: zero data, decoupled decay, conservation") {
    NoiseParams p;
    p.d = 2;
    p.N = 2;
    p.a = 0.25;
    auto ens = build_noise_ensemble(p);
    auto g = make_grid(2, 6);
    auto sys = build_second_moment_system(ens, g);

    std::vector<double> zero(g->nmodes(), 0.0);
    auto z = moment_ode(sys, zero, 0.5);
    for (double v : z.y.back()) CHECK(v == 0.0);

    // coupling removed: independent exponentials
    auto dec = sys;
    for (auto& row : dec.coupling) row.clear();
    std::fill(dec.loss.begin(), dec.loss.end(), 0.0);
    std::vector<double> y0(g->nmodes(), 0.0);
    std::size_t m0 = std::size_t(g->index_of(1, 1));
    y0[m0] = 2.0;
    auto d = moment_ode(dec, y0, 0.3, 1e-3);
    CHECK(std::abs(d.y.back()[m0] - 2.0 * std::exp(-sys.S[m0] * 0.3)) < 1e-10);

    // compact interior support: weighted sum conserved up to tracked flux
    std::vector<double> y1(g->nmodes(), 0.0);
    for (std::size_t m = 0; m < g->nmodes(); ++m)
        if (g->k2(m) <= 4.0) y1[m] = 1.0;
    auto s = moment_ode(sys, y1, 0.2, 1e-3);
    double w0 = 0.0, wT = 0.0;
    for (std::size_t m = 0; m < g->nmodes(); ++m) {
        w0 += sys.wcons[m] * y1[m];
        wT += sys.wcons[m] * s.y.back()[m];
    }
    CHECK(std::abs(wT - w0) <= s.flux * (1.0 + 1e-6) + 1e-8 * w0);
    for (double v : s.y.back()) CHECK(v >= -1e-12);
}
