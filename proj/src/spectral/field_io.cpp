#include "spectral/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ptn {

static double coeff_scale(const FourierField& u) {
    double worst = 1e-300;
    for (const auto& z : u.raw()) worst = std::max(worst, std::abs(z));
    return worst;
}

static const char* kConventionTag = "uhat(k)=int u e_{-k} dx, e_k=(2pi)^{-d/2}exp(ik.x)";

nlohmann::json field_to_json(const FourierField& u) {
    const auto& g = u.grid();
    nlohmann::json doc;
    doc["d"] = g.d;
    doc["K"] = g.K;
    doc["M"] = g.M;
    doc["components"] = u.ncomp();
    doc["convention"] = kConventionTag;
    auto coeffs = nlohmann::json::array();
    for (int c = 0; c < u.ncomp(); ++c)
        for (std::size_t m = 0; m < g.nmodes(); ++m) {
            const auto& k = g.modes[m];
            coeffs.push_back({k[0], k[1], k[2], c, u.at(m, c).real(), u.at(m, c).imag()});
        }
    doc["coeffs"] = std::move(coeffs);
    return doc;
}

FourierField field_from_json(const nlohmann::json& doc) {
    int d = doc.at("d").get<int>();
    int K = doc.at("K").get<int>();
    int M = doc.value("M", 0);
    int ncomp = doc.at("components").get<int>();
    if (doc.value("convention", std::string(kConventionTag)) != kConventionTag)
        throw std::runtime_error("field_from_json: unknown coefficient convention");
    FourierField u(make_grid(d, K, M), ncomp);
    const auto& g = u.grid();
    for (const auto& row : doc.at("coeffs")) {
        int k0 = row.at(0).get<int>(), k1 = row.at(1).get<int>(), k2 = row.at(2).get<int>();
        int c = row.at(3).get<int>();
        int m = g.index_of(k0, k1, k2);
        if (m < 0) throw std::runtime_error("field_from_json: mode outside grid (or zero mode)");
        if (c < 0 || c >= ncomp) throw std::runtime_error("field_from_json: bad component index");
        u.at(std::size_t(m), c) = cplx(row.at(4).get<double>(), row.at(5).get<double>());
    }
    if (u.hermitian_defect() > 1e-10 * coeff_scale(u))
        throw std::runtime_error("field_from_json: Hermitian symmetry violated");
    return u;
}

void save_field(const FourierField& u, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    os << field_to_json(u).dump(1) << '\n';
}

FourierField load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    nlohmann::json doc;
    is >> doc;
    return field_from_json(doc);
}

} // namespace ptn
