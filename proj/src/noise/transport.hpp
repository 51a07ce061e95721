#pragma once
#include "noise/ensemble.hpp"
#include "spectral/field.hpp"

namespace ptn {

// One application of the pseudo-transport operator with advecting field zeta:
//   vector u: (-Delta)^{s_out} Pi( zeta . grad (-Delta)^{a+b} u )
//   scalar u: (-Delta)^{s_out}   ( zeta . grad (-Delta)^{a+b} u )
// where s_out = outer_b_sign * b (default -b, the H^{2b+a}-anti-symmetric
// variant; see NoiseParams).  Dealiased via the grid's physical product.
FourierField apply_transport(const NoiseParams& p, const FourierField& zeta,
                             const FourierField& u);

} // namespace ptn
