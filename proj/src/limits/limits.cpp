#include "limits/limits.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels/kernels.hpp"
#include "sde/cutoff.hpp"
#include "spectral/ops.hpp"
#include "spectral/transform.hpp"

namespace ptn {

namespace {
constexpr double TWO_PI = 6.283185307179586476925286766559;

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, stable near 0.
double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z / 6.0);
    return std::expm1(z) / z;
}
double phi2(double z) {
    if (std::abs(z) < 1e-4) return 0.5 + z * (1.0 / 6.0 + z / 24.0);
    return (std::expm1(z) - z) / (z * z);
}
} // namespace

FourierField fractional_heat(const FourierField& omega0, double nu, double a, double t) {
    FourierField out = omega0;
    const auto& g = out.grid();
    std::vector<double> w(g.nmodes());
    for (std::size_t m = 0; m < g.nmodes(); ++m)
        w[m] = std::exp(-nu * std::pow(g.k2(m), 1.0 + a) * t);
    scale_by_weights(out, w);
    return out;
}

void ou_exact_step(FourierField& state, double nu, double a, double b, double dt,
                   RngStream& rng) {
    const auto& g = state.grid();
    constexpr double INV_SQRT2 = 0.70710678118654752440;
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        if (!g.is_positive(m)) continue;
        double k2v = g.k2(m);
        double lam = nu * std::pow(k2v, 1.0 + a);
        double decay = std::exp(-lam * dt);
        double vstat = std::pow(k2v, -(a + 2.0 * b));
        double sd = std::sqrt(vstat * (1.0 - decay * decay));
        std::size_t mc = g.conj[m];
        for (int c = 0; c < state.ncomp(); ++c) {
            double g1, g2;
            rng.normal_pair(g1, g2);
            cplx z = decay * state.at(m, c) + sd * INV_SQRT2 * cplx(g1, g2);
            state.at(m, c) = z;
            state.at(mc, c) = std::conj(z);
        }
    }
}

namespace {

struct DetContext {
    const LimitRunConfig* cfg;
    std::vector<double> w_cut, w_diss;
    CutoffFunction fr{0.0};

    FourierField nonlin(const FourierField& u) const {
        FourierField nl = advect(u, u);
        if (u.ncomp() == u.grid().d) leray_project_inplace(nl);
        double gn = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            gn += kernels::weighted_abs2(u.comp(c), w_cut.data(), u.nmodes());
        nl *= -fr(std::sqrt(gn));
        return nl;
    }
};

void record_state(LimitTrajectory& tr, const LimitRunConfig& cfg, const DetContext& ctx,
                  const FourierField& u, double t, double diss, bool tripped) {
    tr.times.push_back(t);
    std::vector<double> row;
    for (double s : cfg.record_s) row.push_back(sobolev_norm(u, s));
    tr.norms.push_back(std::move(row));
    tr.besov.push_back(besov_norm(u, cfg.a + 1.0 - 2.0 / cfg.besov_p, cfg.besov_p));
    tr.dissipation.push_back(diss);
    tr.guard_flag.push_back(tripped ? 1 : 0);
    if (cfg.keep_states) tr.states.push_back(u);
}

} // namespace

LimitTrajectory hyperviscous_ns(const LimitRunConfig& cfg) {
    const SpectralGrid& g = *cfg.grid;
    DetContext ctx{&cfg,
                   laplacian_weights(g, cfg.cutoff_s),
                   laplacian_weights(g, 1.0 + cfg.a),
                   CutoffFunction{cfg.cutoff_R}};

    std::vector<double> E(g.nmodes()), P1(g.nmodes()), P2(g.nmodes());
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        double z = cfg.dt * (-cfg.kappa * g.k2(m)
                             - cfg.diss_coeff * std::pow(g.k2(m), 1.0 + cfg.a));
        E[m] = std::exp(z);
        P1[m] = cfg.dt * phi1(z);
        P2[m] = cfg.dt * phi2(z);
    }

    FourierField u = cfg.init;
    LimitTrajectory tr;
    double diss = 0.0;
    bool tripped = false;
    const auto nsteps = std::uint64_t(std::llround(cfg.T / cfg.dt));
    record_state(tr, cfg, ctx, u, 0.0, diss, tripped);
    for (std::uint64_t n = 0; n < nsteps; ++n) {
        double d0 = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            d0 += kernels::weighted_abs2(u.comp(c), ctx.w_diss.data(), u.nmodes());

        FourierField n0 = ctx.nonlin(u);
        // stage: ua = E u + dt phi1 N(u)
        FourierField ua = u;
        scale_by_weights(ua, E);
        FourierField tmp = n0;
        scale_by_weights(tmp, P1);
        ua += tmp;
        // u' = ua + dt phi2 (N(ua) - N(u))
        FourierField n1 = ctx.nonlin(ua);
        n1 -= n0;
        scale_by_weights(n1, P2);
        ua += n1;
        u = std::move(ua);

        if (!u.finite()) {
            tr.failed_step = int(n);
            break;
        }
        double d1 = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            d1 += kernels::weighted_abs2(u.comp(c), ctx.w_diss.data(), u.nmodes());
        diss += 0.5 * cfg.dt * (d0 + d1);
        double gn = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            gn += kernels::weighted_abs2(u.comp(c), ctx.w_cut.data(), u.nmodes());
        if (std::sqrt(gn) > cfg.guard) tripped = true;
        if ((n + 1) % std::uint64_t(cfg.record_every) == 0 || n + 1 == nsteps)
            record_state(tr, cfg, ctx, u, double(n + 1) * cfg.dt, diss, tripped);
    }
    tr.final_state = std::move(u);
    return tr;
}

LimitTrajectory damped_euler(const LimitRunConfig& cfg) {
    const SpectralGrid& g = *cfg.grid;
    DetContext ctx{&cfg,
                   laplacian_weights(g, cfg.cutoff_s),
                   laplacian_weights(g, 1.0 + cfg.a),
                   CutoffFunction{cfg.cutoff_R}};

    auto rhs = [&](const FourierField& v) {
        FourierField f = ctx.nonlin(v);       // already -f_R Pi(v.grad v)
        f.add_scaled(-cfg.nu_damp, v);
        return f;
    };

    FourierField u = cfg.init;
    LimitTrajectory tr;
    bool tripped = false;
    const auto nsteps = std::uint64_t(std::llround(cfg.T / cfg.dt));
    record_state(tr, cfg, ctx, u, 0.0, 0.0, tripped);
    for (std::uint64_t n = 0; n < nsteps; ++n) {
        FourierField k1 = rhs(u);
        FourierField v = u; v.add_scaled(0.5 * cfg.dt, k1);
        FourierField k2 = rhs(v);
        v = u; v.add_scaled(0.5 * cfg.dt, k2);
        FourierField k3 = rhs(v);
        v = u; v.add_scaled(cfg.dt, k3);
        FourierField k4 = rhs(v);
        u.add_scaled(cfg.dt / 6.0, k1);
        u.add_scaled(cfg.dt / 3.0, k2);
        u.add_scaled(cfg.dt / 3.0, k3);
        u.add_scaled(cfg.dt / 6.0, k4);

        if (!u.finite()) {
            tr.failed_step = int(n);
            break;
        }
        double gn = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            gn += kernels::weighted_abs2(u.comp(c), ctx.w_cut.data(), u.nmodes());
        if (std::sqrt(gn) > cfg.guard) tripped = true;
        if ((n + 1) % std::uint64_t(cfg.record_every) == 0 || n + 1 == nsteps)
            record_state(tr, cfg, ctx, u, double(n + 1) * cfg.dt, 0.0, tripped);
    }
    tr.final_state = std::move(u);
    return tr;
}

SecondMomentSystem build_second_moment_system(const NoiseEnsemble& ens, GridPtr grid) {
    SecondMomentSystem sys;
    sys.grid = std::move(grid);
    sys.ens = ens;
    const SpectralGrid& g = *sys.grid;
    const NoiseParams& p = ens.params;
    const double pref = std::pow(TWO_PI, -double(p.d)) * ens.amplitude * ens.amplitude;

    sys.S.resize(g.nmodes());
    sys.coupling.resize(g.nmodes());
    sys.wcons.resize(g.nmodes());
    sys.loss.assign(g.nmodes(), 0.0);
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        sys.S[m] = -2.0 * corrector_scalar(ens, g.modes[m]);
        sys.wcons[m] = std::pow(g.k2(m), p.a + 2.0 * p.b);
    }

    // coupling inflow: for xi and shell mode kap (= xi - eta), eta = xi - kap
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        const auto& xi = g.modes[m];
        double xi4b = std::pow(g.k2(m), -2.0 * p.b);
        for (std::size_t j = 0; j < ens.apos.size(); ++j) {
            double th2 = ens.theta[j] * ens.theta[j];
            for (int sign : {1, -1}) {
                std::array<int, 3> kap{sign * ens.apos[j][0], sign * ens.apos[j][1],
                                       sign * ens.apos[j][2]};
                std::array<int, 3> eta{xi[0] - kap[0], xi[1] - kap[1], xi[2] - kap[2]};
                int me = g.index_of(eta);
                if (me < 0) continue;  // zero mode or outside truncation
                Eigen::Vector3d ev{double(eta[0]), double(eta[1]), double(eta[2])};
                Eigen::Vector3d kv{double(kap[0]), double(kap[1]), double(kap[2])};
                double e2 = ev.squaredNorm();
                double quad = e2 - ev.dot(kv) * ev.dot(kv) / kv.squaredNorm();
                double cij = pref * xi4b * th2 * quad * std::pow(e2, 2.0 * (p.a + p.b));
                if (cij != 0.0) sys.coupling[m].push_back({std::size_t(me), cij});
            }
        }
    }

    // outflow deficit per source mode eta: loss[eta] = S_eta w_eta - sum_xi w_xi C[xi,eta]
    for (std::size_t m = 0; m < g.nmodes(); ++m)
        sys.loss[m] = sys.S[m] * sys.wcons[m];
    for (std::size_t m = 0; m < g.nmodes(); ++m)
        for (const auto& [me, cij] : sys.coupling[m])
            sys.loss[me] -= sys.wcons[m] * cij;
    return sys;
}

MomentSeries moment_ode(const SecondMomentSystem& sys, const std::vector<double>& y0,
                        double T, double dt, int records) {
    const std::size_t n = sys.S.size();
    if (y0.size() != n) throw std::invalid_argument("moment_ode: state size mismatch");
    double smax = 1e-12;
    for (double s : sys.S) smax = std::max(smax, s);
    if (dt <= 0.0) dt = 0.25 / smax;
    auto nsteps = std::uint64_t(std::ceil(T / dt - 1e-9));
    dt = T / double(nsteps);
    std::uint64_t rec_every = std::max<std::uint64_t>(1, nsteps / std::uint64_t(records));

    auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
        for (std::size_t m = 0; m < n; ++m) {
            double acc = -sys.S[m] * y[m];
            for (const auto& [me, cij] : sys.coupling[m]) acc += cij * y[me];
            dy[m] = acc;
        }
    };
    auto outflow = [&](const std::vector<double>& y) {
        double acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += sys.loss[m] * y[m];
        return acc;
    };

    std::vector<double> y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    MomentSeries out;
    out.times.push_back(0.0);
    out.y.push_back(y);
    for (std::uint64_t step = 0; step < nsteps; ++step) {
        double f0 = outflow(y);
        deriv(y, k1);
        for (std::size_t m = 0; m < n; ++m) tmp[m] = y[m] + 0.5 * dt * k1[m];
        deriv(tmp, k2);
        for (std::size_t m = 0; m < n; ++m) tmp[m] = y[m] + 0.5 * dt * k2[m];
        deriv(tmp, k3);
        for (std::size_t m = 0; m < n; ++m) tmp[m] = y[m] + dt * k3[m];
        deriv(tmp, k4);
        for (std::size_t m = 0; m < n; ++m)
            y[m] += dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        out.flux += 0.5 * dt * (f0 + outflow(y));
        if ((step + 1) % rec_every == 0 || step + 1 == nsteps) {
            out.times.push_back(double(step + 1) * dt);
            out.y.push_back(y);
        }
    }
    return out;
}

} // namespace ptn
