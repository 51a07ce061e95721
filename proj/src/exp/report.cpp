#include "exp/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptn {

void ExperimentReport::criterion(const std::string& name, double value,
                                 double threshold, const std::string& cmp,
                                 const std::string& note) {
    bool ok;
    if (cmp == "<=")
        ok = value <= threshold;
    else if (cmp == ">=")
        ok = value >= threshold;
    else
        throw std::invalid_argument("criterion: cmp must be <= or >=");
    nlohmann::json c;
    c["name"] = name;
    c["value"] = value;
    c["threshold"] = threshold;
    c["cmp"] = cmp;
    c["margin"] = (cmp == "<=") ? threshold - value : value - threshold;
    c["pass"] = ok;
    if (!note.empty()) c["note"] = note;
    doc["criteria"].push_back(c);
    passed = passed && ok;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty sample");
    const std::size_t n = xs.size();
    std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
    double hi = xs[n / 2];
    if (n % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + n / 2 - 1, xs.begin() + n / 2);
    return 0.5 * (hi + xs[n / 2 - 1]);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope: need matching samples, n >= 2");
    const double mx = mean_of(x), my = mean_of(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

double mann_whitney_p(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t nx = xs.size(), ny = ys.size();
    if (nx == 0 || ny == 0) throw std::invalid_argument("mann_whitney_p: empty sample");

    // Rank the pooled sample with midranks for ties.
    struct Tagged { double v; int who; };
    std::vector<Tagged> pool;
    pool.reserve(nx + ny);
    for (double v : xs) pool.push_back({v, 0});
    for (double v : ys) pool.push_back({v, 1});
    std::sort(pool.begin(), pool.end(),
              [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

    double rank_sum_y = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pool.size()) {
        std::size_t j = i;
        while (j < pool.size() && pool[j].v == pool[i].v) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        const double t = static_cast<double>(j - i);
        tie_term += t * (t * t - 1.0);
        for (std::size_t k = i; k < j; ++k)
            if (pool[k].who == 1) rank_sum_y += midrank;
        i = j;
    }

    const double n = static_cast<double>(nx + ny);
    const double U = rank_sum_y - 0.5 * static_cast<double>(ny) * (static_cast<double>(ny) + 1.0);
    const double mu = 0.5 * static_cast<double>(nx) * static_cast<double>(ny);
    const double var = static_cast<double>(nx) * static_cast<double>(ny) / 12.0 *
                       ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;
    // Alternative: ys smaller, i.e. U below its mean.  Continuity correction.
    const double z = (U - mu + 0.5) / std::sqrt(var);
    return std_normal_cdf(z);
}

double ks_statistic(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= v) ++i;
        while (j < ys.size() && ys[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

} // namespace ptn
