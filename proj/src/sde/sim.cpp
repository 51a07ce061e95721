#include "sde/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels/kernels.hpp"
#include "noise/transport.hpp"
#include "spectral/ops.hpp"
#include "spectral/transform.hpp"

namespace ptn {

namespace {

// -f_R(||u||_{H^{2b+a-delta}}) Pi(u . grad u), or the zero field when the
// nonlinearity is disabled.
FourierField nonlinear_term(const FourierField& u, const StepContext& ctx) {
    double gn = 0.0;
    for (int c = 0; c < u.ncomp(); ++c)
        gn += kernels::weighted_abs2(u.comp(c), ctx.w_guard.data(), u.nmodes());
    double fr = ctx.cutoff(std::sqrt(gn));
    FourierField nl = advect(u, u);
    leray_project_inplace(nl);
    nl *= -fr;
    return nl;
}

void apply_linear_map(FourierField& u, const StepContext& ctx) {
    if (!ctx.vector_field) {
        kernels::scale_real(u.comp(0), ctx.lin_scalar.data(), u.nmodes());
        return;
    }
    const auto& g = u.grid();
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
        for (int c = 0; c < g.d; ++c) v[c] = u.at(m, c);
        Eigen::Vector3cd w = ctx.lin_mat[m] * v;
        for (int c = 0; c < g.d; ++c) u.at(m, c) = w[c];
    }
}

double diss_value(const FourierField& u, const StepContext& ctx) {
    double acc = 0.0;
    for (int c = 0; c < u.ncomp(); ++c)
        acc += kernels::weighted_abs2(u.comp(c), ctx.w_diss.data(), u.nmodes());
    return acc;
}

bool fail(std::string* err, const std::string& msg) {
    if (err) *err = msg;
    return false;
}

} // namespace

StepContext make_step_context(const SimConfig& cfg) {
    if (!cfg.grid) throw std::invalid_argument("simulate: grid required");
    StepContext ctx;
    ctx.cfg = &cfg;
    ctx.vector_field = (cfg.init.ncomp() == cfg.grid->d && cfg.grid->d > 1);
    ctx.has_noise = cfg.noise.nu > 0.0;
    const SpectralGrid& g = *cfg.grid;
    const double n2ba = 2.0 * cfg.noise.b + cfg.noise.a;

    if (ctx.has_noise) {
        if (cfg.noise.N > g.K)
            throw std::invalid_argument("simulate: noise cutoff N must be <= grid K");
        ctx.ens = build_noise_ensemble(cfg.noise);
        if (cfg.scheme != Scheme::strat_midpoint)
            ctx.corr = build_corrector_table(ctx.ens, g, ctx.vector_field);
    }

    if (cfg.scheme != Scheme::strat_midpoint) {
        if (!ctx.vector_field) {
            ctx.lin_scalar.resize(g.nmodes());
            for (std::size_t m = 0; m < g.nmodes(); ++m) {
                double drift = -cfg.kappa * g.k2(m)
                               + (ctx.has_noise ? ctx.corr.scalar[m] : 0.0);
                ctx.lin_scalar[m] = (cfg.scheme == Scheme::ito_em)
                                        ? 1.0 + cfg.dt * drift
                                        : std::exp(cfg.dt * drift);
            }
        } else {
            ctx.lin_mat.resize(g.nmodes());
            for (std::size_t m = 0; m < g.nmodes(); ++m) {
                Eigen::Matrix3d drift = -cfg.kappa * g.k2(m) * Eigen::Matrix3d::Identity();
                if (ctx.has_noise) drift += ctx.corr.matrix[m];
                if (cfg.scheme == Scheme::ito_em) {
                    ctx.lin_mat[m] = Eigen::Matrix3d::Identity() + cfg.dt * drift;
                } else {
                    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(drift);
                    ctx.lin_mat[m] = es.eigenvectors()
                                     * (cfg.dt * es.eigenvalues().array()).exp().matrix().asDiagonal()
                                     * es.eigenvectors().transpose();
                }
            }
        }
    } else {
        ctx.mid_num.resize(g.nmodes());
        ctx.mid_den.resize(g.nmodes());
        for (std::size_t m = 0; m < g.nmodes(); ++m) {
            double h = 0.5 * cfg.dt * cfg.kappa * g.k2(m);
            ctx.mid_num[m] = 1.0 - h;
            ctx.mid_den[m] = 1.0 + h;
        }
    }

    ctx.w_guard = laplacian_weights(g, n2ba - cfg.cutoff_delta);
    ctx.w_diss = laplacian_weights(g, n2ba + 1.0);
    ctx.cutoff = CutoffFunction{cfg.cutoff_R};
    return ctx;
}

bool step_ito(FourierField& u, const StepContext& ctx, const RngStream& traj,
              std::uint64_t step, std::string* err, double* diss) {
    const SimConfig& cfg = *ctx.cfg;
    double d0 = diss ? diss_value(u, ctx) : 0.0;

    FourierField extra;
    if (cfg.nonlinearity) {
        extra = nonlinear_term(u, ctx);
        extra *= cfg.dt;
    }
    if (ctx.has_noise) {
        FourierField zeta = sample_increment(ctx.ens, cfg.grid, cfg.dt, traj, step);
        FourierField lu = apply_transport(cfg.noise, zeta, u);
        if (extra.empty()) extra = std::move(lu);
        else extra += lu;
    }
    apply_linear_map(u, ctx);
    if (!extra.empty()) u += extra;

    if (!u.finite()) return fail(err, "non-finite state");
    if (diss) *diss += 0.5 * cfg.dt * (d0 + diss_value(u, ctx));
    return true;
}

bool step_strat_midpoint(FourierField& u, const StepContext& ctx, const RngStream& traj,
                         std::uint64_t step, std::string* err, double* diss) {
    const SimConfig& cfg = *ctx.cfg;
    FourierField zeta;
    if (ctx.has_noise)
        zeta = sample_increment(ctx.ens, cfg.grid, cfg.dt, traj, step);

    const double scale = std::max(1.0, std::sqrt(kernels::abs2_sum(u.raw().data(), u.raw().size())));
    FourierField unew = u;
    FourierField mid = u;
    bool converged = false;
    for (int it = 0; it < cfg.fp_max_iter; ++it) {
        // mid = (u + unew)/2
        mid = u;
        mid += unew;
        mid *= 0.5;

        FourierField rhs;
        if (cfg.nonlinearity) {
            rhs = nonlinear_term(mid, ctx);
            rhs *= cfg.dt;
        }
        if (ctx.has_noise) {
            FourierField lm = apply_transport(cfg.noise, zeta, mid);
            if (rhs.empty()) rhs = std::move(lm);
            else rhs += lm;
        }
        // unew = (mid_num * u + rhs) / mid_den
        FourierField next = u;
        for (int c = 0; c < next.ncomp(); ++c)
            kernels::scale_real(next.comp(c), ctx.mid_num.data(), next.nmodes());
        if (!rhs.empty()) next += rhs;
        for (int c = 0; c < next.ncomp(); ++c) {
            cplx* p = next.comp(c);
            for (std::size_t m = 0; m < next.nmodes(); ++m) p[m] /= ctx.mid_den[m];
        }

        double delta2 = 0.0;
        for (std::size_t i = 0; i < next.raw().size(); ++i)
            delta2 += std::norm(next.raw()[i] - unew.raw()[i]);
        unew = std::move(next);
        if (std::sqrt(delta2) <= cfg.fp_tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) return fail(err, "midpoint fixed-point did not converge (reduce dt)");
    if (!unew.finite()) return fail(err, "non-finite state");

    if (diss) {
        mid = u;
        mid += unew;
        mid *= 0.5;
        *diss += cfg.dt * diss_value(mid, ctx);
    }
    u = std::move(unew);
    return true;
}

Trajectory simulate(const SimConfig& cfg) {
    StepContext ctx = make_step_context(cfg);
    const SpectralGrid& g = *cfg.grid;
    if (cfg.init.empty() || cfg.init.grid_ptr().get() != &g)
        throw std::invalid_argument("simulate: initial state missing or on wrong grid");
    if (cfg.dt <= 0.0 || cfg.T < cfg.dt)
        throw std::invalid_argument("simulate: need 0 < dt <= T");

    const double n2ba = 2.0 * cfg.noise.b + cfg.noise.a;
    const bool critical = ctx.vector_field && cfg.kappa > 0.0 && std::abs(n2ba) < 1e-12;
    std::vector<double> slist = cfg.record_s.empty() ? std::vector<double>{n2ba} : cfg.record_s;
    const double s_tr = n2ba + 1.0 - 2.0 / cfg.besov_p;

    FourierField u = cfg.init;
    Trajectory traj;
    RngStream stream = RngStream::root(cfg.seed);
    double diss = 0.0;
    bool tripped = false;
    const double e0 = kernels::abs2_sum(u.raw().data(), u.raw().size());

    auto record = [&](double t) {
        traj.times.push_back(t);
        std::vector<double> row;
        row.reserve(slist.size());
        for (double s : slist) row.push_back(sobolev_norm(u, s));
        traj.norms.push_back(std::move(row));
        traj.besov.push_back(besov_norm(u, s_tr, cfg.besov_p));
        traj.dissipation.push_back(diss);
        traj.guard_flag.push_back(tripped ? 1 : 0);
        if (ctx.vector_field && u.divergence_defect() > 1e-8) {
            traj.failed_step = int(std::lround(t / cfg.dt));
            traj.failure = "divergence-free invariant violated";
        }
        if (critical) {
            double res = std::abs(kernels::abs2_sum(u.raw().data(), u.raw().size())
                                  + 2.0 * cfg.kappa * diss - e0);
            traj.energy_residual_max =
                std::max(traj.energy_residual_max, res / std::max(e0, 1e-300));
        }
    };

    const auto nsteps = std::uint64_t(std::llround(cfg.T / cfg.dt));
    record(0.0);
    for (std::uint64_t n = 0; n < nsteps; ++n) {
        std::string errmsg;
        bool ok = (cfg.scheme == Scheme::strat_midpoint)
                      ? step_strat_midpoint(u, ctx, stream, n, &errmsg, &diss)
                      : step_ito(u, ctx, stream, n, &errmsg, &diss);
        if (!ok) {
            traj.failed_step = int(n);
            traj.failure = errmsg;
            break;
        }
        double gn = 0.0;
        for (int c = 0; c < u.ncomp(); ++c)
            gn += kernels::weighted_abs2(u.comp(c), ctx.w_guard.data(), u.nmodes());
        if (std::sqrt(gn) > cfg.guard) tripped = true;
        if ((n + 1) % std::uint64_t(cfg.record_every) == 0 || n + 1 == nsteps)
            record(double(n + 1) * cfg.dt);
        if (traj.failed_step >= 0) break;
    }
    if (cfg.keep_final_state) traj.final_state = std::move(u);
    return traj;
}

SmallDataThreshold small_data_threshold(double n) {
    if (n <= 0.5) throw std::invalid_argument("small_data_threshold: n > 1/2 required");
    SmallDataThreshold r;
    r.n = n;
    r.p = (n < 1.5) ? 2.0 * (2.0 * n + 1.0) / (2.0 * n - 1.0) : 4.0;
    r.threshold_formula = "delta0^2 < C(n)^{-1/(p(n)-1)} with C(n) symbolic";
    return r;
}

} // namespace ptn
