#pragma once
#include <limits>
#include <string>
#include <vector>

#include "noise/corrector.hpp"
#include "noise/ensemble.hpp"
#include "sde/cutoff.hpp"
#include "spectral/field.hpp"
#include "util/rng.hpp"

namespace ptn {

enum class Scheme { ito_em, ito_etd, strat_midpoint };

struct SimConfig {
    GridPtr grid;
    NoiseParams noise;          // noise.nu == 0 disables the noise entirely
    double kappa = 0.0;         // 0 for Euler, 1 for NSE
    bool nonlinearity = false;  // -f_R(...) Pi(u . grad u), vector runs only
    double cutoff_R = std::numeric_limits<double>::infinity();
    double cutoff_delta = 0.5;  // cutoff norm is H^{2b+a-delta}
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::ito_etd;
    std::uint64_t seed = 0;
    int record_every = 10;
    std::vector<double> record_s;  // H^s norms to record (default {2b+a})
    double besov_p = 2.0;          // trace norm B_{2,p}^{2b+a+1-2/p}
    double guard = std::numeric_limits<double>::infinity();  // blow-up guard on the cutoff norm
    int fp_max_iter = 50;
    double fp_tol = 1e-12;
    FourierField init;
    bool keep_final_state = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> norms;  // per record, one entry per record_s
    std::vector<double> besov;               // trace norm per record
    std::vector<double> dissipation;         // int_0^t ||u||^2_{H^{2b+a+1}}
    std::vector<int> guard_flag;             // 1 once the guard has tripped
    double energy_residual_max = 0.0;        // critical case (2b+a=0, kappa>0) only
    int failed_step = -1;                    // -1 when the run completed
    std::string failure;
    FourierField final_state;
};

// Precomputed per-run tables shared by the step functions.
struct StepContext {
    const SimConfig* cfg = nullptr;
    bool has_noise = false;
    bool vector_field = false;
    NoiseEnsemble ens;
    CorrectorTable corr;                  // Ito schemes only
    // Per-step linear map for the Ito schemes: 1 + dt(-kappa|k|^2 + S) for
    // ito_em, exp(dt(-kappa|k|^2 + S)) for ito_etd; matrix analog for vector
    // runs.
    std::vector<double> lin_scalar;
    std::vector<Eigen::Matrix3d> lin_mat;
    std::vector<double> mid_num, mid_den; // (1 -/+ dt kappa |k|^2 / 2)
    std::vector<double> w_guard;          // |k|^{2(2b+a-delta)}
    std::vector<double> w_diss;           // |k|^{2(2b+a+1)}
    CutoffFunction cutoff{0.0};
};

StepContext make_step_context(const SimConfig& cfg);

// One Euler-Maruyama (scheme ito_em) or exponential (ito_etd) step of the
// Ito form with the exact corrector drift.  Returns false (with *err set) on
// NaN/Inf.  `step` is the 0-based step index used for noise substreams.
// `diss` (optional) accumulates the quadrature of int ||u||^2_{H^{2b+a+1}}:
// endpoint trapezoid for the Ito schemes, midpoint values for strat_midpoint
// (which makes the discrete energy identity exact for the critical case).
bool step_ito(FourierField& u, const StepContext& ctx, const RngStream& traj,
              std::uint64_t step, std::string* err, double* diss = nullptr);

// Implicit midpoint rule on the Stratonovich form (no corrector), fixed-point
// iteration on the non-diagonal terms; conserves H^{2b+a} pathwise for the
// linear kappa=0 equation up to the iteration tolerance.
bool step_strat_midpoint(FourierField& u, const StepContext& ctx, const RngStream& traj,
                         std::uint64_t step, std::string* err, double* diss = nullptr);

Trajectory simulate(const SimConfig& cfg);

// Small-data global well-posedness exponent p(n) for regularity n = 2b+a, and
// the (symbolic) threshold form from the source analysis.
struct SmallDataThreshold {
    double n;
    double p;
    std::string threshold_formula;  // C(n) is not computable; reported symbolically
};
SmallDataThreshold small_data_threshold(double n);

} // namespace ptn
