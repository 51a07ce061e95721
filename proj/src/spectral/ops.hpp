#pragma once
#include <functional>
#include <vector>

#include "spectral/field.hpp"
#include "util/rng.hpp"

namespace ptn {

// Per-mode weight table |k|^{2s} for the grid (used as a multiplier and as
// Sobolev weights).
std::vector<double> laplacian_weights(const SpectralGrid& g, double s);

// In-place real multiplier, applied to every component.
void scale_by_weights(FourierField& u, const std::vector<double>& w);

// Leray projection: per mode uhat(k) <- (I - k k^T/|k|^2) uhat(k).
FourierField leray_project(const FourierField& u);
void leray_project_inplace(FourierField& u);

// uhat(k) <- |k|^{2s} uhat(k).
FourierField apply_fractional_laplacian(const FourierField& u, double s);

// (sum_k |k|^{2s} sum_c |uhat(k,c)|^2)^{1/2}; both +/-k terms are stored, so
// s = 0 reproduces the physical L2 norm exactly (Parseval).
double sobolev_norm(const FourierField& u, double s);

// Besov norm with sharp dyadic blocks Delta_j = {2^j <= |k| < 2^{j+1}}:
// (sum_j 2^{jsp} ||Delta_j u||_{L2}^p)^{1/p}, p finite.
double besov_norm(const FourierField& u, double s, double p);

// Real L2 inner product <u, v> = Re sum_{k,c} uhat conj(vhat).
double l2_inner(const FourierField& u, const FourierField& v);

// Independent centered Gaussian per real-basis coefficient with standard
// deviation spectral_std(k); components independent.  Complex bookkeeping:
// for m in the positive half, uhat(m) = std(m) (g1 + i g2)/sqrt(2) and
// uhat(-m) = conj(uhat(m)), so E|uhat(m)|^2 = std(m)^2.
FourierField sample_gaussian_field(GridPtr grid,
                                   const std::function<double(const std::array<int, 3>&)>& spectral_std,
                                   int ncomp, RngStream& rng);

} // namespace ptn
