#include "noise/transport.hpp"

#include "spectral/ops.hpp"
#include "spectral/transform.hpp"

namespace ptn {

FourierField apply_transport(const NoiseParams& p, const FourierField& zeta,
                             const FourierField& u) {
    FourierField w = (p.a + p.b == 0.0) ? u : apply_fractional_laplacian(u, p.a + p.b);
    FourierField out = advect(zeta, w);
    if (u.ncomp() == u.grid().d) leray_project_inplace(out);
    double s_out = p.outer_b_sign * p.b;
    if (s_out != 0.0) out = apply_fractional_laplacian(out, s_out);
    return out;
}

} // namespace ptn
