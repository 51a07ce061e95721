#include "spectral/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernels/kernels.hpp"

namespace ptn {

FourierField::FourierField(GridPtr grid, int ncomp)
    : grid_(std::move(grid)), ncomp_(ncomp),
      data_(std::size_t(ncomp) * grid_->nmodes(), cplx(0.0, 0.0)) {
    if (ncomp_ != 1 && ncomp_ != grid_->d)
        throw std::invalid_argument("FourierField: ncomp must be 1 or d");
}

void FourierField::set_zero() {
    std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0));
}

FourierField& FourierField::operator+=(const FourierField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

FourierField& FourierField::operator*=(double a) {
    for (auto& z : data_) z *= a;
    return *this;
}

void FourierField::add_scaled(double a, const FourierField& o) {
    kernels::axpy(data_.data(), a, o.data_.data(), data_.size());
}

double FourierField::hermitian_defect() const {
    double worst = 0.0;
    const std::size_t n = nmodes();
    for (int c = 0; c < ncomp_; ++c) {
        const cplx* p = comp(c);
        for (std::size_t m = 0; m < n; ++m) {
            cplx gap = p[grid_->conj[m]] - std::conj(p[m]);
            worst = std::max(worst, std::abs(gap));
        }
    }
    return worst;
}

void FourierField::symmetrize() {
    const std::size_t n = nmodes();
    for (int c = 0; c < ncomp_; ++c) {
        cplx* p = comp(c);
        for (std::size_t m = 0; m < n; ++m) {
            std::size_t mc = grid_->conj[m];
            if (mc < m) continue;
            cplx avg = 0.5 * (p[m] + std::conj(p[mc]));
            p[m] = avg;
            p[mc] = std::conj(avg);
        }
    }
}

double FourierField::divergence_defect() const {
    if (ncomp_ != grid_->d) return 0.0;
    // Relative to the field's L2 norm: a per-mode scale would let round-off
    // junk on empty modes register as O(1) defects.
    double worst = 0.0;
    double total = 0.0;
    const std::size_t n = nmodes();
    for (std::size_t m = 0; m < n; ++m) {
        cplx dot(0.0, 0.0);
        for (int c = 0; c < ncomp_; ++c) {
            dot += double(grid_->modes[m][c]) * at(m, c);
            total += std::norm(at(m, c));
        }
        worst = std::max(worst, std::abs(dot) / std::sqrt(grid_->k2(m)));
    }
    return total > 0.0 ? worst / std::sqrt(total) : 0.0;
}

bool FourierField::finite() const {
    for (const auto& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace ptn
