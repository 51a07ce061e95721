#pragma once
#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace ptn {

// Truncated Fourier lattice on T^d = [0,2pi)^d: retained modes are
// {k in Z^d : 0 < |k| <= K}, zero mode always excluded (zero-mean fields).
// M is the physical grid size per axis used for dealiased products; the
// default is the smallest 7-smooth integer >= 3K+1, which keeps products of
// two band-K fields alias-free on retained modes.
struct SpectralGrid {
    int d;
    int K;
    int M;

    std::vector<std::array<int, 3>> modes;  // k, with k[2] = 0 when d = 2
    std::vector<std::size_t> conj;          // index of -k per mode

    SpectralGrid(int d, int K, int M = 0);

    std::size_t nmodes() const { return modes.size(); }

    // -1 when the mode is not retained (includes the zero mode).
    int index_of(int k0, int k1, int k2 = 0) const;
    int index_of(const std::array<int, 3>& k) const {
        return index_of(k[0], k[1], k[2]);
    }

    double k2(std::size_t m) const {
        const auto& k = modes[m];
        return double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }

    // First nonzero coordinate positive ("positive half" of the lattice).
    bool is_positive(std::size_t m) const;

    static int fast_size(int lower_bound);

private:
    std::vector<int> lut_;  // dense (2K+1)^d table of mode indices
    int lut_at(int k0, int k1, int k2) const;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int d, int K, int M = 0);

} // namespace ptn
