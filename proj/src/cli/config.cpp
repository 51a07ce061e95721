#include "cli/config.hpp"

namespace ptn {

namespace {

bool want_number(const nlohmann::json& doc, const std::string& key,
                 std::vector<std::string>& errors, bool required) {
    if (!doc.contains(key)) {
        if (required) errors.push_back("/" + key + ": required field is missing");
        return false;
    }
    if (!doc[key].is_number()) {
        errors.push_back("/" + key + ": expected a number");
        return false;
    }
    return true;
}

} // namespace

ValidationResult validate_config(const nlohmann::json& doc) {
    ValidationResult out;
    if (!doc.is_object()) {
        out.errors.push_back("/: config must be a JSON object");
        return out;
    }
    nlohmann::json cfg = doc;

    // Defaults.
    if (!cfg.contains("gamma")) cfg["gamma"] = 0.0;
    if (!cfg.contains("shell")) cfg["shell"] = "ball";
    if (!cfg.contains("scheme")) cfg["scheme"] = "ito_etd";
    if (!cfg.contains("record_every")) cfg["record_every"] = 10;

    // Required numeric fields.
    const bool hasK = want_number(cfg, "K", out.errors, true);
    const bool hasdt = want_number(cfg, "dt", out.errors, true);
    const bool hasT = want_number(cfg, "T", out.errors, true);

    if (cfg.contains("shell") && cfg["shell"] != "ball" && cfg["shell"] != "annulus")
        out.errors.push_back("/shell: must be \"ball\" or \"annulus\"");
    if (cfg.contains("scheme")) {
        const auto s = cfg["scheme"].get<std::string>();
        if (s != "ito_em" && s != "ito_etd" && s != "strat_midpoint")
            out.errors.push_back("/scheme: must be ito_em, ito_etd or strat_midpoint");
    }
    if (cfg.contains("d")) {
        const int d = cfg["d"].is_number_integer() ? cfg["d"].get<int>() : -1;
        if (d != 2 && d != 3) out.errors.push_back("/d: must be 2 or 3");
    }
    if (cfg.contains("gamma") && cfg.contains("d") && cfg["gamma"].is_number()) {
        const double g = cfg["gamma"].get<double>();
        const double dmax = cfg["d"].is_number() ? cfg["d"].get<double>() / 2.0 : 1.5;
        if (g < 0.0 || g > dmax)
            out.errors.push_back("/gamma: must lie in [0, d/2]");
    }

    if (hasK) {
        const double K = cfg["K"].get<double>();
        if (K < 1) out.errors.push_back("/K: must be >= 1");
        if (cfg.contains("N") && cfg["N"].is_number() && cfg["N"].get<double>() > K)
            out.errors.push_back("/N, /K: noise cutoff N exceeds grid cutoff K");
        if (cfg.contains("N_list") && cfg["N_list"].is_array()) {
            double prev = 0.0;
            for (const auto& n : cfg["N_list"]) {
                if (!n.is_number()) {
                    out.errors.push_back("/N_list: entries must be numbers");
                    break;
                }
                if (n.get<double>() > K)
                    out.errors.push_back("/N_list, /K: entry " + n.dump() +
                                         " exceeds grid cutoff K");
                if (n.get<double>() <= prev)
                    out.errors.push_back("/N_list: must be strictly increasing");
                prev = n.get<double>();
            }
        }
    }
    if (hasdt && hasT) {
        if (cfg["dt"].get<double>() <= 0.0) out.errors.push_back("/dt: must be > 0");
        if (cfg["dt"].get<double>() > cfg["T"].get<double>())
            out.errors.push_back("/dt, /T: time step exceeds the horizon");
    }

    // Regime caveat: the Euler delayed blow-up analysis needs a <= 1/2; above
    // that only weak solutions are constructed.
    if (cfg.contains("a") && cfg["a"].is_number() && cfg["a"].get<double>() > 0.5 &&
        cfg.value("mode", "") == "euler")
        out.warnings.push_back("/a: a > 1/2 with Euler mode is the weak-solution regime");

    if (!out.errors.empty()) return out;  // no partial defaults on failure
    out.normalized = cfg;
    return out;
}

} // namespace ptn
