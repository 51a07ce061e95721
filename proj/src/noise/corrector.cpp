#include "noise/corrector.hpp"

#include <cmath>

namespace ptn {

namespace {
constexpr double TWO_PI = 6.283185307179586476925286766559;

// Iterate eta over the full active shell (both halves), skipping eta == xi.
template <typename F>
void for_active(const NoiseEnsemble& ens, const std::array<int, 3>& xi, F&& body) {
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        const auto& k = ens.apos[j];
        double th2 = ens.theta[j] * ens.theta[j];
        for (int sign : {1, -1}) {
            std::array<int, 3> eta{sign * k[0], sign * k[1], sign * k[2]};
            if (eta == xi) continue;
            body(eta, th2);
        }
    }
}

double prefactor(const NoiseEnsemble& ens) {
    const NoiseParams& p = ens.params;
    return 0.5 * std::pow(TWO_PI, -double(p.d)) * ens.c_d * p.nu
           / (ens.norm_ha * ens.norm_ha);
}

} // namespace

double corrector_scalar(const NoiseEnsemble& ens, const std::array<int, 3>& xi) {
    const double a = ens.params.a;
    Eigen::Vector3d xv{double(xi[0]), double(xi[1]), double(xi[2])};
    const double xi2 = xv.squaredNorm();
    double acc = 0.0;
    for_active(ens, xi, [&](const std::array<int, 3>& eta, double th2) {
        Eigen::Vector3d ev{double(eta[0]), double(eta[1]), double(eta[2])};
        double e2 = ev.squaredNorm();
        double quad = xi2 - xv.dot(ev) * xv.dot(ev) / e2;  // xi^T P_eta xi
        double gap2 = (xv - ev).squaredNorm();
        acc += th2 * quad * (gap2 == 0.0 ? 0.0 : std::pow(gap2, a));
    });
    return -prefactor(ens) * std::pow(xi2, a) * acc;
}

Eigen::Matrix3d corrector_vector(const NoiseEnsemble& ens, const std::array<int, 3>& xi) {
    const double a = ens.params.a;
    Eigen::Vector3d xv{double(xi[0]), double(xi[1]), double(xi[2])};
    const double xi2 = xv.squaredNorm();
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for_active(ens, xi, [&](const std::array<int, 3>& eta, double th2) {
        Eigen::Vector3d ev{double(eta[0]), double(eta[1]), double(eta[2])};
        double e2 = ev.squaredNorm();
        double quad = xi2 - xv.dot(ev) * xv.dot(ev) / e2;
        Eigen::Vector3d gv = xv - ev;
        double g2 = gv.squaredNorm();
        if (g2 == 0.0) return;  // zero intermediate mode carries no energy
        Eigen::Matrix3d pgap = Eigen::Matrix3d::Identity() - gv * gv.transpose() / g2;
        acc += th2 * quad * std::pow(g2, a) * pgap;
    });
    Eigen::Matrix3d pxi = Eigen::Matrix3d::Identity() - xv * xv.transpose() / xi2;
    Eigen::Matrix3d s = -prefactor(ens) * std::pow(xi2, a) * (pxi * acc * pxi);
    if (ens.params.d == 2) {
        s.row(2).setZero();
        s.col(2).setZero();
    }
    // enforce exact symmetry against round-off
    return 0.5 * (s + s.transpose());
}

CorrectorTable build_corrector_table(const NoiseEnsemble& ens, const SpectralGrid& g,
                                     bool vector_form) {
    CorrectorTable t;
    t.scalar.resize(g.nmodes());
    if (vector_form) t.matrix.resize(g.nmodes());
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        t.scalar[m] = corrector_scalar(ens, g.modes[m]);
        if (vector_form) t.matrix[m] = corrector_vector(ens, g.modes[m]);
    }
    return t;
}

double corrector_limit_scalar(const NoiseEnsemble& ens, const std::array<int, 3>& xi) {
    double xi2 = double(xi[0]) * xi[0] + double(xi[1]) * xi[1] + double(xi[2]) * xi[2];
    return -ens.params.nu * std::pow(xi2, 1.0 + ens.params.a);
}

double vector_limit_coefficient(const NoiseEnsemble& ens) {
    return -3.0 * ens.params.nu / 5.0;
}

} // namespace ptn
