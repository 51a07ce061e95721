#include "spectral/grid.hpp"

#include <stdexcept>

namespace ptn {

int SpectralGrid::fast_size(int lower_bound) {
    for (int n = lower_bound;; ++n) {
        int r = n;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return n;
    }
}

SpectralGrid::SpectralGrid(int d_, int K_, int M_) : d(d_), K(K_), M(M_) {
    if (d != 2 && d != 3) throw std::invalid_argument("SpectralGrid: d must be 2 or 3");
    if (K < 1) throw std::invalid_argument("SpectralGrid: K must be >= 1");
    if (M == 0) M = fast_size(3 * K + 1);
    if (M < 2 * K + 1) throw std::invalid_argument("SpectralGrid: M too small for band K");

    const int W = 2 * K + 1;
    lut_.assign(d == 2 ? W * W : W * W * W, -1);
    const int K2 = K * K;
    const int lo2 = (d == 2) ? 0 : -K;
    for (int k0 = -K; k0 <= K; ++k0)
        for (int k1 = -K; k1 <= K; ++k1)
            for (int k2v = lo2; k2v <= (d == 2 ? 0 : K); ++k2v) {
                int n2 = k0 * k0 + k1 * k1 + k2v * k2v;
                if (n2 == 0 || n2 > K2) continue;
                lut_[std::size_t(((k0 + K) * W + (k1 + K)) * (d == 2 ? 1 : W)
                                 + (d == 2 ? 0 : k2v + K))] = int(modes.size());
                modes.push_back({k0, k1, k2v});
            }
    conj.resize(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        int c = index_of(-modes[m][0], -modes[m][1], -modes[m][2]);
        conj[m] = std::size_t(c);
    }
}

int SpectralGrid::lut_at(int k0, int k1, int k2v) const {
    if (k0 < -K || k0 > K || k1 < -K || k1 > K || k2v < -K || k2v > K) return -1;
    const int W = 2 * K + 1;
    return lut_[std::size_t(((k0 + K) * W + (k1 + K)) * (d == 2 ? 1 : W)
                            + (d == 2 ? 0 : k2v + K))];
}

int SpectralGrid::index_of(int k0, int k1, int k2v) const {
    if (d == 2 && k2v != 0) return -1;
    return lut_at(k0, k1, k2v);
}

bool SpectralGrid::is_positive(std::size_t m) const {
    const auto& k = modes[m];
    for (int i = 0; i < d; ++i) {
        if (k[i] > 0) return true;
        if (k[i] < 0) return false;
    }
    return false;
}

GridPtr make_grid(int d, int K, int M) {
    return std::make_shared<const SpectralGrid>(d, K, M);
}

} // namespace ptn
