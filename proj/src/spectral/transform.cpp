#include "spectral/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ptn {
namespace {

constexpr double TWO_PI = 6.283185307179586476925286766559;

struct Workspace {
    int d, M;
    std::size_t npts;
    fftw_complex* buf;
    fftw_plan fwd, bwd;
    std::mutex mtx;

    Workspace(int d_, int M_) : d(d_), M(M_) {
        npts = 1;
        for (int i = 0; i < d; ++i) npts *= std::size_t(M);
        buf = fftw_alloc_complex(npts);
        if (d == 2) {
            fwd = fftw_plan_dft_2d(M, M, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(M, M, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_3d(M, M, M, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_3d(M, M, M, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    ~Workspace() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }

    std::size_t bin(const std::array<int, 3>& k) const {
        auto wrap = [this](int v) { return std::size_t((v % M + M) % M); };
        if (d == 2) return wrap(k[0]) * std::size_t(M) + wrap(k[1]);
        return (wrap(k[0]) * std::size_t(M) + wrap(k[1])) * std::size_t(M) + wrap(k[2]);
    }
};

Workspace& workspace(int d, int M) {
    static std::mutex cache_mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<Workspace>> cache;
    std::lock_guard<std::mutex> lk(cache_mtx);
    auto& slot = cache[{d, M}];
    if (!slot) slot = std::make_unique<Workspace>(d, M);
    return *slot;
}

// Scatter uhat * scale * (i k)^{deriv-axis} into the FFT buffer and run the
// backward transform; returns the real part.
void synth(const FourierField& u, int c, int deriv_axis, std::vector<double>& out) {
    const auto& g = u.grid();
    Workspace& ws = workspace(g.d, g.M);
    std::lock_guard<std::mutex> lk(ws.mtx);
    const double scale = std::pow(TWO_PI, -0.5 * g.d);
    for (std::size_t j = 0; j < ws.npts; ++j) ws.buf[j][0] = ws.buf[j][1] = 0.0;
    const cplx* p = u.comp(c);
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        cplx z = p[m] * scale;
        if (deriv_axis >= 0) z *= cplx(0.0, double(g.modes[m][deriv_axis]));
        std::size_t b = ws.bin(g.modes[m]);
        ws.buf[b][0] = z.real();
        ws.buf[b][1] = z.imag();
    }
    fftw_execute(ws.bwd);
    out.resize(ws.npts);
    for (std::size_t j = 0; j < ws.npts; ++j) out[j] = ws.buf[j][0];
}

} // namespace

void to_physical(const FourierField& u, int c, std::vector<double>& out) {
    synth(u, c, -1, out);
}

void from_physical(const std::vector<double>& in, FourierField& u, int c) {
    const auto& g = u.grid();
    Workspace& ws = workspace(g.d, g.M);
    std::lock_guard<std::mutex> lk(ws.mtx);
    if (in.size() != ws.npts)
        throw std::invalid_argument("from_physical: grid size mismatch");
    for (std::size_t j = 0; j < ws.npts; ++j) {
        ws.buf[j][0] = in[j];
        ws.buf[j][1] = 0.0;
    }
    fftw_execute(ws.fwd);
    // uhat(k) = (2pi)^{-d/2} (2pi/M)^d sum_j u(x_j) e^{-ik.x_j}
    const double scale = std::pow(TWO_PI, -0.5 * g.d) * std::pow(TWO_PI / g.M, g.d);
    cplx* p = u.comp(c);
    for (std::size_t m = 0; m < g.nmodes(); ++m) {
        std::size_t b = ws.bin(g.modes[m]);
        p[m] = cplx(ws.buf[b][0], ws.buf[b][1]) * scale;
    }
}

FourierField advect(const FourierField& v, const FourierField& w) {
    const auto& g = w.grid();
    if (v.grid_ptr().get() != &g)
        throw std::invalid_argument("advect: grid mismatch");
    if (v.ncomp() != g.d)
        throw std::invalid_argument("advect: v must be a vector field");

    std::vector<std::vector<double>> vphys(std::size_t(g.d));
    for (int j = 0; j < g.d; ++j) to_physical(v, j, vphys[std::size_t(j)]);

    FourierField out(w.grid_ptr(), w.ncomp());
    std::vector<double> dw, acc;
    for (int c = 0; c < w.ncomp(); ++c) {
        acc.assign(vphys[0].size(), 0.0);
        for (int j = 0; j < g.d; ++j) {
            synth(w, c, j, dw);
            const double* vj = vphys[std::size_t(j)].data();
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += vj[i] * dw[i];
        }
        from_physical(acc, out, c);
    }
    return out;
}

} // namespace ptn
