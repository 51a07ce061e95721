#pragma once
#include <cstdint>

#include <json.hpp>

#include "exp/report.hpp"
#include "noise/ensemble.hpp"
#include "sde/sim.hpp"
#include "spectral/field.hpp"

namespace ptn {

// Shared config plumbing -----------------------------------------------------

// Reads the common noise fields (d, a, b, gamma, nu, N, shell, outer_b_sign)
// out of a config object, with the module defaults.
NoiseParams noise_params_from(const nlohmann::json& cfg);

// Deterministic initial data from a config object.  Types:
//   {"type":"zero"}
//   {"type":"modes","modes":[[k0,k1,k2,comp,re,im],...]}   (symmetrized;
//       vector fields are Leray-projected afterwards)
//   {"type":"stationary","a":...,"b":...}   per-mode std |k|^{-(a+2b)}, seeded
//   {"type":"taylor_green","amplitude":A}   d=3 divergence-free vortex
//   {"type":"shear","amplitude":A,"k":[..],"comp":c}   single-mode shear
FourierField build_initial_field(const GridPtr& grid, const nlohmann::json& init,
                                 int ncomp, std::uint64_t seed);

// "ito_em" | "ito_etd" | "strat_midpoint".
Scheme scheme_from(const std::string& name);

// Each experiment takes a validated config object and a seed, runs to
// completion, and returns a report with embedded pass/fail criteria plus the
// CSV series backing them.  Configs are plain JSON so the CLI and the test
// binaries drive the same code paths.

// Corrector tables against their closed-form large-N limits (scalar and
// vector form), including the exact viscosity-linearity check.
ExperimentReport exp_corrector_convergence(const nlohmann::json& cfg);

// Monte-Carlo decay of the martingale part of <omega, phi> as N grows.
ExperimentReport exp_martingale_decay(const nlohmann::json& cfg, std::uint64_t seed);

// Pathwise distance between the stochastic scalar model and the deterministic
// fractional heat flow, as a function of N.
ExperimentReport exp_scaling_limit(const nlohmann::json& cfg, std::uint64_t seed);

// Stationary quadratic variation: exact Gaussian mean/variance of the QV
// quadratic form under the stationary law, its hyperviscous limit, and a
// Monte-Carlo bracket.
ExperimentReport exp_stationary_qv(const nlohmann::json& cfg, std::uint64_t seed);

// Invariance of the per-mode stationary law under the exact OU step and under
// the discretised linear SPDE.
ExperimentReport exp_stationarity(const nlohmann::json& cfg, std::uint64_t seed);

// 3D cut-off Navier-Stokes with transport noise versus its hyperviscous
// limit: pathwise distances and the fraction of paths staying below the
// blow-up guard.
ExperimentReport exp_blowup_delay(const nlohmann::json& cfg, std::uint64_t seed);

// Uniform-in-N space-time moment bounds across the admissible a-range.
ExperimentReport exp_uniform_smr(const nlohmann::json& cfg, std::uint64_t seed);

} // namespace ptn
