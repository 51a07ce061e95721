#include "noise/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "noise/corrector.hpp"

namespace ptn {

namespace {
constexpr double TWO_PI = 6.283185307179586476925286766559;

bool on_shell(const NoiseParams& p, double kn2) {
    if (kn2 == 0.0) return false;
    double n2 = double(p.N) * p.N;
    if (p.shell == NoiseParams::Shell::ball) return kn2 <= n2;
    return kn2 >= n2 && kn2 <= 4.0 * n2;
}
} // namespace

bool NoiseEnsemble::is_active(const std::array<int, 3>& k) const {
    return on_shell(params, double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]);
}

double NoiseEnsemble::theta_of(const std::array<int, 3>& k) const {
    double kn2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    if (!on_shell(params, kn2)) return 0.0;
    return std::pow(kn2, -0.5 * (params.a + params.gamma));
}

std::array<Eigen::Vector3d, 2> make_frame(int d, const std::array<int, 3>& k) {
    Eigen::Vector3d kv{double(k[0]), double(k[1]), double(k[2])};
    if (d == 2) {
        Eigen::Vector3d a1(-kv[1], kv[0], 0.0);
        return {a1.normalized(), Eigen::Vector3d::Zero()};
    }
    Eigen::Vector3d khat = kv.normalized();
    Eigen::Vector3d seed{double(k[1]), double(k[2]), double(k[0])};  // cyclic shift
    Eigen::Vector3d a1 = seed - seed.dot(khat) * khat;
    if (a1.squaredNorm() < 1e-12 * kv.squaredNorm()) {
        seed = Eigen::Vector3d(double(k[1]), -double(k[0]), 0.0);
        a1 = seed - seed.dot(khat) * khat;
    }
    a1.normalize();
    Eigen::Vector3d a2 = khat.cross(a1);
    return {a1, a2};
}

NoiseEnsemble build_noise_ensemble(const NoiseParams& p) {
    if (p.d != 2 && p.d != 3) throw std::invalid_argument("noise: d must be 2 or 3");
    if (p.N < 1) throw std::invalid_argument("noise: N >= 1 required");
    if (p.nu <= 0.0) throw std::invalid_argument("noise: nu > 0 required");
    if (p.gamma < 0.0 || p.gamma > 0.5 * p.d)
        throw std::invalid_argument("noise: gamma must lie in [0, d/2]");

    NoiseEnsemble ens;
    ens.params = p;
    const int R = (p.shell == NoiseParams::Shell::ball) ? p.N : 2 * p.N;
    const int lo2 = (p.d == 2) ? 0 : -R;
    double sum = 0.0;
    for (int k0 = -R; k0 <= R; ++k0)
        for (int k1 = -R; k1 <= R; ++k1)
            for (int k2 = lo2; k2 <= (p.d == 2 ? 0 : R); ++k2) {
                std::array<int, 3> k{k0, k1, k2};
                double kn2 = double(k0) * k0 + double(k1) * k1 + double(k2) * k2;
                if (!on_shell(p, kn2)) continue;
                double th = std::pow(kn2, -0.5 * (p.a + p.gamma));
                sum += std::pow(kn2, p.a) * th * th;  // loop covers the full shell
                bool positive = (k0 > 0) || (k0 == 0 && (k1 > 0 || (k1 == 0 && k2 > 0)));
                if (!positive) continue;
                ens.apos.push_back(k);
                ens.theta.push_back(th);
                ens.frames.push_back(make_frame(p.d, k));
            }
    ens.norm_ha = std::sqrt(sum);
    ens.c_d = std::pow(TWO_PI, p.d) * 2.0 * p.d / (p.d - 1.0);
    ens.amplitude = std::sqrt(ens.c_d * p.nu) / ens.norm_ha;
    return ens;
}

Eigen::Matrix3d covariance_fourier(const NoiseEnsemble& ens, const std::array<int, 3>& k) {
    double kn2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    if (kn2 == 0.0) throw std::invalid_argument("covariance_fourier: zero mode");
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
    double th = ens.theta_of(k);
    if (th == 0.0) return out;
    Eigen::Vector3d kv{double(k[0]), double(k[1]), double(k[2])};
    Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - kv * kv.transpose() / kn2;
    if (ens.params.d == 2) {
        // only the top-left 2x2 block is meaningful
        proj.row(2).setZero();
        proj.col(2).setZero();
    }
    out = ens.amplitude * ens.amplitude * th * th * proj;
    return out;
}

FourierField sample_increment(const NoiseEnsemble& ens, const GridPtr& grid,
                              double dt, const RngStream& traj, std::uint64_t step) {
    FourierField zeta(grid, grid->d);
    const double root_dt = std::sqrt(dt);
    constexpr double INV_SQRT2 = 0.70710678118654752440;
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        const auto& k = ens.apos[j];
        int m = grid->index_of(k);
        if (m < 0)
            throw std::invalid_argument("sample_increment: noise mode outside grid (need N <= K)");
        std::size_t mc = grid->conj[std::size_t(m)];
        double amp = ens.amplitude * ens.theta[j] * root_dt * INV_SQRT2;
        for (int i = 0; i < ens.nframes(); ++i) {
            RngStream sub = traj.child(2 * j + std::size_t(i));
            sub.counter = step;
            double gc, gs;
            sub.normal_pair(gc, gs);
            cplx z(amp * gc, amp * gs);
            const Eigen::Vector3d& a = ens.frames[j][std::size_t(i)];
            for (int c = 0; c < grid->d; ++c) {
                zeta.at(std::size_t(m), c) += a[c] * z;
                zeta.at(mc, c) += a[c] * std::conj(z);
            }
        }
    }
    return zeta;
}

nlohmann::json bounds_report(const NoiseEnsemble& ens, int Kscan,
                             const std::vector<double>& deltas) {
    const NoiseParams& p = ens.params;
    nlohmann::json rep;
    rep["params"] = {{"d", p.d}, {"a", p.a}, {"b", p.b}, {"gamma", p.gamma},
                     {"nu", p.nu}, {"N", p.N},
                     {"shell", p.shell == NoiseParams::Shell::ball ? "ball" : "annulus"}};
    rep["norm_ha"] = ens.norm_ha;
    rep["active_mode_count"] = 2 * ens.apos.size();

    // (i) sup_k |Qhat(k)| |k|^{2a}: per-mode covariance operator norm is
    // amplitude^2 theta_k^2 (projector has unit norm).
    double sup_q = 0.0;
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        const auto& k = ens.apos[j];
        double kn2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        sup_q = std::max(sup_q, ens.amplitude * ens.amplitude * ens.theta[j] * ens.theta[j]
                                    * std::pow(kn2, p.a));
    }
    rep["sup_qhat_k2a"] = sup_q;
    rep["sup_qhat_k2a_ratio_to_nu_over_theta2"] = sup_q / (p.nu / (ens.norm_ha * ens.norm_ha));

    // (ii) sum_{k,i} ||(-Delta)^{a/2} sigma_{k,i}||^2_Linf, with
    // ||e_k||_Linf = sqrt(2) (2pi)^{-d/2}.
    double linf_budget = 0.0;
    const double ek_inf2 = 2.0 * std::pow(TWO_PI, -double(p.d));
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        const auto& k = ens.apos[j];
        double kn2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        // factor 2: cosine and sine partners; nframes frames each
        linf_budget += 2.0 * ens.nframes() * ens.amplitude * ens.amplitude
                       * ens.theta[j] * ens.theta[j] * std::pow(kn2, p.a) * ek_inf2;
    }
    rep["linf_budget"] = linf_budget;
    rep["linf_budget_over_nu"] = linf_budget / p.nu;

    // (iii) minimal C_delta with |Shat(xi)| <= delta |xi|^2 + C_delta |xi|^{2+2a}
    // over retained 0 < |xi| <= Kscan (scalar corrector).
    auto grid = make_grid(p.d, Kscan, 2 * Kscan + 2);
    nlohmann::json cdeltas = nlohmann::json::array();
    std::vector<double> svals(grid->nmodes());
    for (std::size_t m = 0; m < grid->nmodes(); ++m)
        svals[m] = corrector_scalar(ens, grid->modes[m]);
    for (double del : deltas) {
        double cd = 0.0;
        for (std::size_t m = 0; m < grid->nmodes(); ++m) {
            double k2v = grid->k2(m);
            double need = (std::abs(svals[m]) - del * k2v) / std::pow(k2v, 1.0 + p.a);
            cd = std::max(cd, need);
        }
        cdeltas.push_back({{"delta", del}, {"C_delta", cd}});
    }
    rep["order_bound"] = cdeltas;

    // (iv) sum_{k,i} ||sigma_{k,i}||^2_{H^{a+eps}} for eps in {0, 0.1}.
    for (double eps : {0.0, 0.1}) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ens.apos.size(); ++j) {
            const auto& k = ens.apos[j];
            double kn2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
            acc += 2.0 * ens.nframes() * ens.amplitude * ens.amplitude
                   * ens.theta[j] * ens.theta[j] * std::pow(kn2, p.a + eps);
        }
        rep[eps == 0.0 ? "h_a_budget" : "h_a_plus_eps_budget"] = acc;
    }
    return rep;
}

} // namespace ptn
