#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "exp/experiments.hpp"
#include "util/format.hpp"

namespace ptn {

namespace {

// Sparse representation of one QV term X_{k,type,i} = <L_{k,type,i} omega, e^R_m>
// as a linear functional of the unit-variance real coordinates (p_xi, q_xi) of
// psi = (-Delta)^{a+b} omega under the stationary law (E|psihat(xi)|^2 = |xi|^{2a}).
// Slots are indexed (positive-rep lattice index) * 2 + {0: p, 1: q}.
using SparseVec = std::vector<std::pair<std::uint64_t, double>>;

std::uint64_t slot_key(const std::array<int, 3>& xip, int KS, bool q_part) {
    const std::uint64_t B = std::uint64_t(2 * KS + 1);
    const std::uint64_t i0 = std::uint64_t(xip[0] + KS);
    const std::uint64_t i1 = std::uint64_t(xip[1] + KS);
    const std::uint64_t i2 = std::uint64_t(xip[2] + KS);
    return (((i0 * B + i1) * B + i2) << 1) | std::uint64_t(q_part ? 1 : 0);
}

bool positive_half(const std::array<int, 3>& k) {
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] > 0;
}

// The full set of QV terms for phi = e^R_m (cosine mode m).
std::vector<SparseVec> build_qv_terms(const NoiseEnsemble& ens,
                                      const std::array<int, 3>& m) {
    const NoiseParams& p = ens.params;
    const int d = p.d;
    const double m2 = double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
    const int KS = int(std::ceil(std::sqrt(m2))) + 2 * p.N + 2;
    const double pref = std::numbers::sqrt2 *
                        std::pow(2.0 * std::numbers::pi, -d / 2.0) *
                        std::pow(m2, double(p.outer_b_sign) * p.b);

    std::vector<SparseVec> terms;
    terms.reserve(ens.apos.size() * 2 * std::size_t(ens.nframes()));
    for (std::size_t j = 0; j < ens.apos.size(); ++j) {
        const auto& k = ens.apos[j];
        const double c = ens.amplitude * ens.theta[j] / std::numbers::sqrt2;
        for (int fi = 0; fi < ens.nframes(); ++fi) {
            const Eigen::Vector3d& av = ens.frames[j][fi];
            // type 0: cosine sigma (coeff c at +-k); type 1: sine sigma
            // (coeff -ic at +k, +ic at -k).
            for (int type = 0; type < 2; ++type) {
                std::map<std::uint64_t, double> entries;
                for (int sgn : {1, -1}) {
                    const std::array<int, 3> kap{sgn * k[0], sgn * k[1], sgn * k[2]};
                    const std::array<int, 3> xi{m[0] - kap[0], m[1] - kap[1], m[2] - kap[2]};
                    if (xi[0] == 0 && xi[1] == 0 && xi[2] == 0) continue;
                    const double xi2 = double(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
                    const double adote = av[0] * xi[0] + av[1] * xi[1] + av[2] * xi[2];
                    // sigma-hat coefficient at kap
                    cplx sk = (type == 0) ? cplx(c, 0.0)
                                          : cplx(0.0, (sgn > 0) ? -c : c);
                    // X contribution: Re[ pref * sk * (i a.xi) * psihat(xi) ]
                    const cplx coef = pref * sk * cplx(0.0, adote);
                    const std::array<int, 3> xip =
                        positive_half(xi) ? xi
                                          : std::array<int, 3>{-xi[0], -xi[1], -xi[2]};
                    const double s = positive_half(xi) ? 1.0 : -1.0;
                    const double amp = std::sqrt(std::pow(xi2, p.a) / 2.0);
                    entries[slot_key(xip, KS, false)] += amp * coef.real();
                    entries[slot_key(xip, KS, true)] -= amp * s * coef.imag();
                }
                if (entries.empty()) continue;
                SparseVec v(entries.begin(), entries.end());
                terms.push_back(std::move(v));
            }
        }
    }
    return terms;
}

double sparse_dot(const SparseVec& x, const SparseVec& y) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].first < y[j].first)
            ++i;
        else if (x[i].first > y[j].first)
            ++j;
        else
            s += x[i++].second * y[j++].second;
    }
    return s;
}

struct QvMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t nterms = 0;
};

// I = sum_t X_t^2 with jointly Gaussian X_t: E I = sum |x_t|^2 and
// Var I = 2 sum_{t,s} (x_t . x_s)^2 (Isserlis).  Off-diagonal pairs are found
// through shared slots, so the pass is linear in the number of terms.
QvMoments qv_exact(const std::vector<SparseVec>& terms) {
    QvMoments out;
    out.nterms = terms.size();
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        out.mean += sparse_dot(terms[t], terms[t]);
        for (const auto& e : terms[t]) buckets[e.first].push_back(t);
    }
    double var = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        // Candidate partners s >= t sharing at least one slot, deduplicated.
        std::vector<std::size_t> cand;
        for (const auto& e : terms[t])
            for (std::size_t s : buckets.at(e.first))
                if (s >= t) cand.push_back(s);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (std::size_t s : cand) {
            const double g = sparse_dot(terms[t], terms[s]);
            var += (s == t) ? 2.0 * g * g : 4.0 * g * g;
        }
    }
    out.variance = var;
    return out;
}

} // namespace

ExperimentReport exp_stationary_qv(const nlohmann::json& cfg, std::uint64_t seed) {
    ExperimentReport rep;
    rep.doc["experiment"] = "stationary_qv";
    rep.doc["config"] = cfg;
    rep.doc["seed"] = seed;
    rep.doc["criteria"] = nlohmann::json::array();

    const auto N_list = cfg.at("N_list").get<std::vector<int>>();
    const NoiseParams base = noise_params_from(cfg);
    std::array<int, 3> m{1, 0, 0};
    if (cfg.contains("phi")) {
        auto v = cfg["phi"].get<std::vector<int>>();
        for (std::size_t i = 0; i < v.size() && i < 3; ++i) m[i] = v[i];
    }
    const double m2 = double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
    const double limit_mean = 2.0 * base.nu * m2;

    std::ostringstream csv;
    CsvWriter w(csv, {"N", "mean_exact", "var_exact", "mean_mc", "var_mc", "mc_replicas"});

    const int mc_replicas = cfg.value("mc_replicas", 0);
    std::vector<double> means, vars;
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        NoiseParams p = base;
        p.N = N_list[ni];
        NoiseEnsemble ens = build_noise_ensemble(p);
        const auto terms = build_qv_terms(ens, m);
        const QvMoments ex = qv_exact(terms);
        means.push_back(ex.mean);
        vars.push_back(ex.variance);

        double mc_mean = 0.0, mc_var = 0.0;
        if (mc_replicas > 0) {
            // Shared slot ordering for the Gaussian draw.
            std::map<std::uint64_t, std::size_t> order;
            for (const auto& t : terms)
                for (const auto& e : t)
                    order.emplace(e.first, order.size());
            std::vector<double> g(order.size());
            std::vector<double> samples(static_cast<std::size_t>(mc_replicas), 0.0);
            for (int r = 0; r < mc_replicas; ++r) {
                RngStream rng = RngStream::root(seed).child(std::uint64_t(ni)).child(std::uint64_t(r));
                for (double& x : g) x = rng.normal();
                double I = 0.0;
                for (const auto& t : terms) {
                    double x = 0.0;
                    for (const auto& e : t) x += e.second * g[order.at(e.first)];
                    I += x * x;
                }
                samples[std::size_t(r)] = I;
            }
            mc_mean = mean_of(samples);
            const double se_mean = stderr_of(samples);
            double ssq = 0.0;
            for (double s : samples) ssq += (s - mc_mean) * (s - mc_mean);
            mc_var = ssq / double(mc_replicas - 1);
            // SE of the sample variance from the empirical fourth moment.
            std::vector<double> dev2(samples.size());
            for (std::size_t r = 0; r < samples.size(); ++r)
                dev2[r] = (samples[r] - mc_mean) * (samples[r] - mc_mean);
            const double se_var = stderr_of(dev2);
            rep.criterion("MC mean brackets exact, N=" + std::to_string(p.N),
                          std::abs(mc_mean - ex.mean), 3.0 * se_mean, "<=",
                          "exact=" + fmt17(ex.mean) + " mc=" + fmt17(mc_mean));
            rep.criterion("MC variance brackets exact, N=" + std::to_string(p.N),
                          std::abs(mc_var - ex.variance), 3.0 * se_var, "<=",
                          "exact=" + fmt17(ex.variance) + " mc=" + fmt17(mc_var));
        }

        nlohmann::json pt;
        pt["N"] = p.N;
        pt["mean_exact"] = ex.mean;
        pt["var_exact"] = ex.variance;
        pt["nterms"] = ex.nterms;
        if (mc_replicas > 0) {
            pt["mean_mc"] = mc_mean;
            pt["var_mc"] = mc_var;
        }
        rep.doc["points"].push_back(pt);
        w.raw_row({std::to_string(p.N), fmt17(ex.mean), fmt17(ex.variance), fmt17(mc_mean),
                   fmt17(mc_var), std::to_string(mc_replicas)});
    }

    rep.doc["limit_mean"] = limit_mean;
    rep.criterion("exact mean at N=" + std::to_string(N_list.back()) +
                      " relative gap to 2 nu |m|^2",
                  std::abs(means.back() - limit_mean) / limit_mean,
                  cfg.value("mean_gap_max", 0.10), "<=");
    rep.criterion("variance ratio N=" + std::to_string(N_list.back()) + "/N=" +
                      std::to_string(N_list.front()),
                  vars.back() / vars.front(), cfg.value("var_ratio_max", 0.25), "<=");

    rep.csv_files.emplace_back("stationary_qv.csv", csv.str());

    if (cfg.contains("stationarity")) {
        ExperimentReport st = exp_stationarity(cfg["stationarity"], seed);
        for (auto& c : st.doc["criteria"]) rep.doc["criteria"].push_back(c);
        for (auto& f : st.csv_files) rep.csv_files.push_back(std::move(f));
        rep.passed = rep.passed && st.passed;
    }

    rep.doc["passed"] = rep.passed;
    return rep;
}

} // namespace ptn
