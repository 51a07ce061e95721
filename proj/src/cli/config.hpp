#pragma once
#include <string>
#include <vector>

#include <json.hpp>

namespace ptn {

struct ValidationResult {
    nlohmann::json normalized;            // meaningful only when errors is empty
    std::vector<std::string> errors;      // all violations, path-prefixed
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

// Applies the schema defaults (gamma=0, shell=ball, scheme=ito_etd,
// record_every=10), checks required fields (K, dt, T) and cross-field
// constraints (N <= K and every N_list entry <= K; dt <= T), and flags the
// a > 1/2 Euler regime caveat.  Never returns partial defaults on failure.
// Unknown top-level keys are preserved untouched (experiment-specific blocks
// validate themselves on use).  Idempotent.
ValidationResult validate_config(const nlohmann::json& doc);

} // namespace ptn
