#include "spectral/ops.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels/kernels.hpp"

namespace ptn {

std::vector<double> laplacian_weights(const SpectralGrid& g, double s) {
    std::vector<double> w(g.nmodes());
    for (std::size_t m = 0; m < g.nmodes(); ++m) w[m] = std::pow(g.k2(m), s);
    return w;
}

void scale_by_weights(FourierField& u, const std::vector<double>& w) {
    for (int c = 0; c < u.ncomp(); ++c)
        kernels::scale_real(u.comp(c), w.data(), u.nmodes());
}

void leray_project_inplace(FourierField& u) {
    const auto& g = u.grid();
    if (u.ncomp() != g.d)
        throw std::invalid_argument("leray_project: vector field required");
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        const auto& k = g.modes[m];
        cplx dot(0.0, 0.0);
        for (int c = 0; c < g.d; ++c) dot += double(k[c]) * u.at(m, c);
        dot /= g.k2(m);
        for (int c = 0; c < g.d; ++c) u.at(m, c) -= double(k[c]) * dot;
    }
}

FourierField leray_project(const FourierField& u) {
    FourierField out = u;
    leray_project_inplace(out);
    return out;
}

FourierField apply_fractional_laplacian(const FourierField& u, double s) {
    FourierField out = u;
    scale_by_weights(out, laplacian_weights(u.grid(), s));
    return out;
}

double sobolev_norm(const FourierField& u, double s) {
    const auto w = laplacian_weights(u.grid(), s);
    double acc = 0.0;
    for (int c = 0; c < u.ncomp(); ++c)
        acc += kernels::weighted_abs2(u.comp(c), w.data(), u.nmodes());
    return std::sqrt(acc);
}

double besov_norm(const FourierField& u, double s, double p) {
    if (p < 1.0) throw std::invalid_argument("besov_norm: p >= 1 required");
    const auto& g = u.grid();
    // block j contains 2^j <= |k| < 2^{j+1}
    int jmax = int(std::floor(std::log2(double(g.K)))) + 1;
    std::vector<double> block(std::size_t(jmax) + 1, 0.0);
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        int j = int(std::floor(0.5 * std::log2(g.k2(m)) + 1e-12));
        double a2 = 0.0;
        for (int c = 0; c < u.ncomp(); ++c) a2 += std::norm(u.at(m, c));
        block[std::size_t(j)] += a2;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < block.size(); ++j)
        acc += std::pow(2.0, double(j) * s * p) * std::pow(block[j], 0.5 * p);
    return std::pow(acc, 1.0 / p);
}

double l2_inner(const FourierField& u, const FourierField& v) {
    double acc = 0.0;
    const auto& a = u.raw();
    const auto& b = v.raw();
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return acc;
}

FourierField sample_gaussian_field(GridPtr grid,
                                   const std::function<double(const std::array<int, 3>&)>& spectral_std,
                                   int ncomp, RngStream& rng) {
    FourierField u(std::move(grid), ncomp);
    const auto& g = u.grid();
    constexpr double INV_SQRT2 = 0.70710678118654752440;
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        if (!g.is_positive(m)) continue;
        double sd = spectral_std(g.modes[m]);
        std::size_t mc = g.conj[m];
        for (int c = 0; c < ncomp; ++c) {
            double g1, g2;
            rng.normal_pair(g1, g2);
            cplx z = sd * INV_SQRT2 * cplx(g1, g2);
            u.at(m, c) = z;
            u.at(mc, c) = std::conj(z);
        }
    }
    return u;
}

} // namespace ptn
