#pragma once
#include <vector>

#include "spectral/field.hpp"

namespace ptn {

// FFT bridge between retained spectral coefficients and the dealiasing
// physical grid (M points per axis).  Plans are created with FFTW_ESTIMATE so
// planning is deterministic, and cached per (d, M).  All entry points are
// serialized internally; callers may treat them as pure functions.

// Evaluate component c of u on the physical grid (row-major, M^d reals).
void to_physical(const FourierField& u, int c, std::vector<double>& out);

// Gather retained modes of a real physical-grid function into component c.
// Exact for band-limited data when the band fits strictly inside M.
void from_physical(const std::vector<double>& in, FourierField& u, int c);

// Dealiased v . grad w, component-wise in w.  v must be a vector field on the
// same grid as w.  Exact on retained modes for band-limited inputs; the
// output coefficients follow the field convention, i.e.
//   out(k) = (2pi)^{-d/2} * sum_eta vhat(k-eta) . (i eta) what(eta).
FourierField advect(const FourierField& v, const FourierField& w);

} // namespace ptn
