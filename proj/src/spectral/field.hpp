#pragma once
#include <complex>
#include <vector>

#include "spectral/grid.hpp"

namespace ptn {

using cplx = std::complex<double>;

// Spectral coefficients of a zero-mean real field on T^d.
//
// Convention: u(x) = sum_k uhat(k) e_k(x) with e_k(x) = (2pi)^{-d/2} e^{ik.x},
// i.e. uhat(k) = integral of u(x) e_{-k}(x) dx.  Both members of every +/-k
// pair are stored; Hermitian symmetry uhat(-k) = conj(uhat(k)) is an
// invariant maintained by construction and checkable via hermitian_defect().
// With this storage, sum_k |uhat(k)|^2 equals the squared L2 norm (Parseval),
// so no pair-reweighting appears in any norm.
//
// Layout: data[c * nmodes + m] for component c, mode index m.
class FourierField {
public:
    FourierField() = default;
    FourierField(GridPtr grid, int ncomp);

    const SpectralGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int ncomp() const { return ncomp_; }
    std::size_t nmodes() const { return grid_->nmodes(); }

    cplx& at(std::size_t m, int c = 0) { return data_[std::size_t(c) * nmodes() + m]; }
    const cplx& at(std::size_t m, int c = 0) const { return data_[std::size_t(c) * nmodes() + m]; }

    cplx* comp(int c) { return data_.data() + std::size_t(c) * nmodes(); }
    const cplx* comp(int c) const { return data_.data() + std::size_t(c) * nmodes(); }

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    void set_zero();
    bool empty() const { return !grid_; }

    FourierField& operator+=(const FourierField& o);
    FourierField& operator-=(const FourierField& o);
    FourierField& operator*=(double a);
    // this += a * o
    void add_scaled(double a, const FourierField& o);

    double hermitian_defect() const;   // max |uhat(-k) - conj(uhat(k))|
    void symmetrize();                  // project onto Hermitian-symmetric part
    double divergence_defect() const;   // max |k . uhat(k)| / |uhat(k)|-scale, vector only
    bool finite() const;                // no NaN/Inf anywhere

private:
    GridPtr grid_;
    int ncomp_ = 0;
    std::vector<cplx> data_;
};

} // namespace ptn
