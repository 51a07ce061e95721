#pragma once
#include <Eigen/Dense>

#include "noise/ensemble.hpp"
#include "spectral/field.hpp"

namespace ptn {

// Exact Ito-Stratonovich corrector multipliers Shat^N(xi), i.e. the Fourier
// symbol of S^N = (1/2) sum_{k,i} L_{k,i}^2, by direct lattice summation.
// The fluctuation exponent b cancels between the two applications of the
// transport operator, so both multipliers are b-independent.

// Scalar form:
//   Shat(xi) = -(1/2) (2pi)^{-d} C_d nu / |theta|^2 * |xi|^{2a}
//              * sum_{eta active, eta != xi} theta_eta^2
//                (xi^T P_eta xi) |xi - eta|^{2a},
// with P_eta = I - eta eta^T/|eta|^2.  Limit as N -> infinity (ball, gamma=0):
// -nu |xi|^{2+2a}.
double corrector_scalar(const NoiseEnsemble& ens, const std::array<int, 3>& xi);

// Vector form (general d; the 3/5 limit statement is d=3):
//   Shat(xi) = -(1/2) (2pi)^{-d} C_d nu / |theta|^2 * |xi|^{2a}
//              * P_xi [ sum_{eta active, eta != xi} theta_eta^2
//                       (xi^T P_eta xi) |xi - eta|^{2a} P_{xi-eta} ] P_xi,
// a symmetric negative-semidefinite d x d matrix with range in xi-perp.
// Limit (d=3, ball, gamma=0): -(3 nu/5) |xi|^{2+2a} P_xi.
Eigen::Matrix3d corrector_vector(const NoiseEnsemble& ens, const std::array<int, 3>& xi);

// Per-mode multiplier table for a grid (scalar values and, when vector is
// requested, matrices), precomputed once per (ensemble, grid).
struct CorrectorTable {
    std::vector<double> scalar;
    std::vector<Eigen::Matrix3d> matrix;  // empty unless vector requested
};

CorrectorTable build_corrector_table(const NoiseEnsemble& ens, const SpectralGrid& g,
                                     bool vector_form);

// Limit multipliers for reporting: -nu |xi|^{2+2a} (scalar) and the vector
// coefficient -(3 nu/5) (d=3).
double corrector_limit_scalar(const NoiseEnsemble& ens, const std::array<int, 3>& xi);
double vector_limit_coefficient(const NoiseEnsemble& ens);

} // namespace ptn
