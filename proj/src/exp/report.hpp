#pragma once
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ptn {

// Result of one verification experiment: a structured report plus named CSV
// series.  Every pass/fail entry embeds the numeric margin it came from.
struct ExperimentReport {
    nlohmann::json doc;
    std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content
    bool passed = true;

    // cmp is one of "<=", ">=" (value vs threshold).
    void criterion(const std::string& name, double value, double threshold,
                   const std::string& cmp, const std::string& note = "");
};

// ---- small statistics toolbox ----
double mean_of(const std::vector<double>& xs);
double stderr_of(const std::vector<double>& xs);   // sample SE of the mean
double median_of(std::vector<double> xs);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// One-sided Mann-Whitney U test (normal approximation with tie correction):
// p-value for the alternative "ys stochastically smaller than xs".
double mann_whitney_p(const std::vector<double>& xs, const std::vector<double>& ys);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> xs, std::vector<double> ys);

} // namespace ptn
