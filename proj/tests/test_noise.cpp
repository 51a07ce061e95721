#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "noise/corrector.hpp"
#include "noise/ensemble.hpp"
#include "noise/transport.hpp"
#include "spectral/ops.hpp"
#include "spectral/transform.hpp"
#include "util/rng.hpp"

using namespace ptn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// The real-basis ensemble elements as spectral fields: for every stored
// positive mode k and frame a there is a cosine element with
// sigmahat(+/-k) = (A theta/sqrt(2)) a and a sine element with
// sigmahat(k) = i (A theta/sqrt(2)) a, sigmahat(-k) = -i (...).  This matches
// the complex draw in sample_increment, which combines the two.
std::vector<FourierField> sigma_basis(const NoiseEnsemble& ens, const GridPtr& grid) {
    std::vector<FourierField> out;
    constexpr double INV_SQRT2 = 0.70710678118654752440;
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        int m = grid->index_of(ens.apos[j]);
        REQUIRE(m >= 0);
        std::size_t mc = grid->conj[std::size_t(m)];
        double amp = ens.amplitude * ens.theta[j] * INV_SQRT2;
        for (int i = 0; i < ens.nframes(); ++i) {
            const Eigen::Vector3d& a = ens.frames[j][std::size_t(i)];
            FourierField fc(grid, grid->d), fs(grid, grid->d);
            for (int c = 0; c < grid->d; ++c) {
                fc.at(std::size_t(m), c) = amp * a[c];
                fc.at(mc, c) = amp * a[c];
                fs.at(std::size_t(m), c) = cplx(0.0, amp * a[c]);
                fs.at(mc, c) = cplx(0.0, -amp * a[c]);
            }
            out.push_back(std::move(fc));
            out.push_back(std::move(fs));
        }
    }
    return out;
}

FourierField random_field(GridPtr g, int ncomp, std::uint64_t seed) {
    RngStream rng = RngStream::root(seed);
    return sample_gaussian_field(
        g, [](const std::array<int, 3>&) { return 1.0; }, ncomp, rng);
}

} // namespace

TEST_CASE("ensemble bookkeeping: counts, C_d, |theta|_{h^a}") {
    SUBCASE("d=3, N=1, a=0") {
        NoiseParams p;
        p.d = 3;
        p.N = 1;
        auto ens = build_noise_ensemble(p);
        CHECK(ens.apos.size() == 3);  // 6 active modes, positive half stored
        CHECK(ens.c_d == doctest::Approx(std::pow(2 * kPi, 3) * 3.0).epsilon(1e-14));
        CHECK(ens.norm_ha * ens.norm_ha == doctest::Approx(6.0).epsilon(1e-14));
        CHECK(ens.amplitude ==
              doctest::Approx(std::sqrt(ens.c_d * p.nu) / ens.norm_ha).epsilon(1e-14));
    }
    SUBCASE("d=2, N=1, a=0") {
        NoiseParams p;
        p.d = 2;
        p.N = 1;
        auto ens = build_noise_ensemble(p);
        CHECK(ens.apos.size() == 2);
        CHECK(ens.c_d == doctest::Approx(std::pow(2 * kPi, 2) * 4.0).epsilon(1e-14));
        CHECK(ens.norm_ha * ens.norm_ha == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("theta weights and shells") {
        NoiseParams p;
        p.d = 2;
        p.N = 4;
        p.a = 0.25;
        p.gamma = 0.5;
        auto ens = build_noise_ensemble(p);
        CHECK(ens.theta_of({2, 1, 0}) ==
              doctest::Approx(std::pow(5.0, -0.5 * (p.a + p.gamma))).epsilon(1e-14));
        CHECK(ens.theta_of({5, 0, 0}) == 0.0);
        CHECK(ens.is_active({0, -3, 0}));
        p.shell = NoiseParams::Shell::annulus;
        auto ann = build_noise_ensemble(p);
        CHECK(!ann.is_active({1, 0, 0}));
        CHECK(ann.is_active({0, 5, 0}));
        CHECK(ann.is_active({4, 0, 0}));
    }
}

TEST_CASE("frames: orthonormal basis of k-perp") {
    for (int d : {2, 3}) {
        NoiseParams p;
        p.d = d;
        p.N = 3;
        auto ens = build_noise_ensemble(p);
        for (std::size_t j = 0; j < ens.apos.size(); ++j) {
            Eigen::Vector3d kv{double(ens.apos[j][0]), double(ens.apos[j][1]),
                               double(ens.apos[j][2])};
            for (int i = 0; i < ens.nframes(); ++i) {
                const auto& a = ens.frames[j][std::size_t(i)];
                CHECK(std::abs(a.dot(kv)) < 1e-12);
                CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
                if (d == 2) CHECK(std::abs(a[2]) < 1e-15);
            }
            if (d == 3)
                CHECK(std::abs(ens.frames[j][0].dot(ens.frames[j][1])) < 1e-12);
        }
    }
}

TEST_CASE("covariance_fourier equals the brute-force basis sum (d=2, N=2)") {
    NoiseParams p;
    p.d = 2;
    p.N = 2;
    p.a = 0.25;
    p.nu = 0.8;
    auto ens = build_noise_ensemble(p);
    auto grid = make_grid(2, 4);
    auto basis = sigma_basis(ens, grid);
    for (const auto& k : ens.apos) {
        int m = grid->index_of(k);
        Eigen::Matrix3d brute = Eigen::Matrix3d::Zero();
        for (const auto& s : basis)
            for (int c1 = 0; c1 < 2; ++c1)
                for (int c2 = 0; c2 < 2; ++c2)
                    brute(c1, c2) +=
                        (s.at(std::size_t(m), c1) * std::conj(s.at(std::size_t(m), c2))).real();
        Eigen::Matrix3d want = covariance_fourier(ens, k);
        CHECK((brute - want).norm() < 1e-12 * want.norm());
        // symmetric, PSD, annihilates k
        Eigen::Vector3d kv{double(k[0]), double(k[1]), 0.0};
        CHECK((want - want.transpose()).norm() < 1e-14);
        CHECK((want * kv).norm() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(want);
        CHECK(es.eigenvalues().minCoeff() > -1e-14);
    }
    CHECK(covariance_fourier(ens, {3, 3, 0}).norm() == 0.0);  // off shell
}

TEST_CASE("corrector == (1/2) sum of squared transport operators") {
    // single-mode inputs; the grid retains |xi| + N so no intermediate mode
    // is truncated, making the composition exact.
    NoiseParams base;
    base.a = 0.25;
    base.b = 0.15;
    base.gamma = 0.3;
    base.nu = 0.7;
    std::array<int, 3> xi{2, 1, 0};
    const cplx v0(0.7, 0.3);

    for (int d : {2, 3}) {
        for (int N : {1, 2, 3}) {
            NoiseParams p = base;
            p.d = d;
            p.N = N;
            auto ens = build_noise_ensemble(p);
            auto grid = make_grid(d, int(std::ceil(std::sqrt(5.0))) + N + 1);
            auto basis = sigma_basis(ens, grid);
            int m = grid->index_of(xi);
            REQUIRE(m >= 0);
            std::size_t mc = grid->conj[std::size_t(m)];

            SUBCASE((std::string("scalar d=") + std::to_string(d) + " N=" + std::to_string(N)).c_str()) {
                FourierField u(grid, 1);
                u.at(std::size_t(m)) = v0;
                u.at(mc) = std::conj(v0);
                cplx acc = 0.0;
                for (const auto& s : basis) {
                    auto lu = apply_transport(p, s, u);
                    acc += apply_transport(p, s, lu).at(std::size_t(m));
                }
                cplx want = corrector_scalar(ens, xi) * v0;
                CHECK(std::abs(0.5 * acc - want) < 1e-10);
            }
            SUBCASE((std::string("vector d=") + std::to_string(d) + " N=" + std::to_string(N)).c_str()) {
                // input coefficient in xi-perp
                Eigen::Vector3d kv{2.0, 1.0, 0.0};
                Eigen::Vector3d e = (d == 2) ? Eigen::Vector3d{-1.0, 2.0, 0.0}
                                             : Eigen::Vector3d{-1.0, 2.0, 1.0};
                e -= e.dot(kv) / kv.squaredNorm() * kv;
                e.normalize();
                FourierField u(grid, d);
                for (int c = 0; c < d; ++c) {
                    u.at(std::size_t(m), c) = v0 * e[c];
                    u.at(mc, c) = std::conj(v0) * e[c];
                }
                Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
                for (const auto& s : basis) {
                    auto lu = apply_transport(p, s, u);
                    auto llu = apply_transport(p, s, lu);
                    for (int c = 0; c < d; ++c) acc[c] += llu.at(std::size_t(m), c);
                }
                Eigen::Matrix3d S = corrector_vector(ens, xi);
                Eigen::Vector3cd want = S * (v0 * e).eval();
                CHECK((0.5 * acc - want).norm() < 1e-10);
            }
        }
    }
}

TEST_CASE("corrector sign, symmetry, and structure") {
    NoiseParams p;
    p.d = 3;
    p.N = 3;
    p.a = 0.25;
    auto ens = build_noise_ensemble(p);
    for (auto xi : std::vector<std::array<int, 3>>{{1, 0, 0}, {2, 1, 0}, {1, 1, 1}, {3, -2, 1}}) {
        CHECK(corrector_scalar(ens, xi) <= 0.0);
        Eigen::Matrix3d S = corrector_vector(ens, xi);
        CHECK((S - S.transpose()).norm() < 1e-12 * (1.0 + S.norm()));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
        CHECK(es.eigenvalues().maxCoeff() < 1e-12);
        // range in xi-perp: S xi = 0
        Eigen::Vector3d kv{double(xi[0]), double(xi[1]), double(xi[2])};
        CHECK((S * kv).norm() < 1e-12 * (1.0 + S.norm()));
    }
    // lattice symmetry under coordinate permutation
    double s1 = corrector_scalar(ens, {2, 1, 0});
    double s2 = corrector_scalar(ens, {0, 2, 1});
    double s3 = corrector_scalar(ens, {-1, 0, -2});
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
    CHECK(s1 == doctest::Approx(s3).epsilon(1e-12));
    // b does not enter either multiplier
    NoiseParams pb = p;
    pb.b = 0.4;
    auto ensb = build_noise_ensemble(pb);
    CHECK(corrector_scalar(ensb, {2, 1, 0}) == doctest::Approx(s1).epsilon(1e-13));
}

TEST_CASE("corrector table matches per-mode evaluation") {
    NoiseParams p;
    p.d = 2;
    p.N = 2;
    p.a = -0.25;
    auto ens = build_noise_ensemble(p);
    auto grid = make_grid(2, 3);
    auto tab = build_corrector_table(ens, *grid, true);
    for (std::size_t m = 0; m < grid->nmodes(); ++m) {
        CHECK(tab.scalar[m] == corrector_scalar(ens, grid->modes[m]));
        CHECK((tab.matrix[m] - corrector_vector(ens, grid->modes[m])).norm() == 0.0);
    }
}

TEST_CASE("transport is anti-symmetric in H^{2b+a}") {
    for (int d : {2, 3}) {
        NoiseParams p;
        p.d = d;
        p.a = 0.25;
        p.b = 0.15;
        p.N = 2;
        auto ens = build_noise_ensemble(p);
        auto grid = make_grid(d, 5);
        RngStream traj = RngStream::root(31).child(std::uint64_t(d));
        auto zeta = sample_increment(ens, grid, 1.0, traj, 0);

        double s = 2 * p.b + p.a;
        auto u = random_field(grid, 1, 41 + std::uint64_t(d));
        auto lu = apply_transport(p, zeta, u);
        double scale = sobolev_norm(u, s) * sobolev_norm(lu, s) + 1e-30;
        CHECK(std::abs(l2_inner(apply_fractional_laplacian(lu, s), u)) < 1e-10 * scale);

        auto w = leray_project(random_field(grid, d, 43 + std::uint64_t(d)));
        auto lw = apply_transport(p, zeta, w);
        double scw = sobolev_norm(w, s) * sobolev_norm(lw, s) + 1e-30;
        CHECK(std::abs(l2_inner(apply_fractional_laplacian(lw, s), w)) < 1e-10 * scw);
        CHECK(lw.divergence_defect() < 1e-10);
    }
}

TEST_CASE("sample_increment: determinism, symmetry, divergence, covariance") {
    NoiseParams p;
    p.d = 2;
    p.N = 2;
    p.a = 0.25;
    p.nu = 0.6;
    auto ens = build_noise_ensemble(p);
    auto grid = make_grid(2, 4);
    RngStream traj = RngStream::root(57).child(7);

    auto z1 = sample_increment(ens, grid, 1e-3, traj, 5);
    auto z2 = sample_increment(ens, grid, 1e-3, traj, 5);
    CHECK(z1.raw() == z2.raw());
    auto z3 = sample_increment(ens, grid, 1e-3, traj, 6);
    CHECK(z1.raw() != z3.raw());
    CHECK(z1.hermitian_defect() < 1e-14);
    CHECK(z1.divergence_defect() < 1e-12);
    // off-shell modes untouched
    CHECK(std::abs(z1.at(std::size_t(grid->index_of(3, 0)), 0)) == 0.0);

    const int reps = 4000;
    const double dt = 0.5;
    std::array<int, 3> k{1, 1, 0};
    int m = grid->index_of(k);
    Eigen::Matrix3d emp = Eigen::Matrix3d::Zero();
    for (int r = 0; r < reps; ++r) {
        auto z = sample_increment(ens, grid, dt, traj, std::uint64_t(1000 + r));
        for (int c1 = 0; c1 < 2; ++c1)
            for (int c2 = 0; c2 < 2; ++c2)
                emp(c1, c2) +=
                    (z.at(std::size_t(m), c1) * std::conj(z.at(std::size_t(m), c2))).real();
    }
    emp /= double(reps) * dt;
    Eigen::Matrix3d want = covariance_fourier(ens, k);
    double se = want.norm() * std::sqrt(2.0 / reps);
    CHECK((emp - want).norm() < 5.0 * se);
}

TEST_CASE("bounds report: closed-form Linf budget and finite constants") {
    for (int d : {2, 3}) {
        NoiseParams p;
        p.d = d;
        p.N = 3;
        p.a = 0.25;
        p.nu = 1.3;
        auto ens = build_noise_ensemble(p);
        auto rep = bounds_report(ens, 8, {0.1, 0.5});
        CHECK(std::abs(double(rep["linf_budget"]) - 4.0 * d * p.nu) < 1e-8);
        CHECK(double(rep["sup_qhat_k2a"]) > 0.0);
        CHECK(std::isfinite(double(rep["sup_qhat_k2a_ratio_to_nu_over_theta2"])));
        for (const auto& e : rep["order_bound"]) {
            CHECK(double(e["C_delta"]) >= 0.0);
            CHECK(std::isfinite(double(e["C_delta"])));
        }
        CHECK(double(rep["h_a_budget"]) > 0.0);
    }
}
