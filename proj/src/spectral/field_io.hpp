#pragma once
#include <string>

#include <json.hpp>

#include "spectral/field.hpp"

namespace ptn {

// Self-describing JSON spectral dump.  Header carries (d, K, M, components)
// and the coefficient convention tag; body is a flat list of
// [k0, k1, k2, component, re, im] tuples for every retained mode.
nlohmann::json field_to_json(const FourierField& u);

// Validates the header, mode set, and Hermitian symmetry (tolerance 1e-10
// relative) before returning the field.
FourierField field_from_json(const nlohmann::json& doc);

void save_field(const FourierField& u, const std::string& path);
FourierField load_field(const std::string& path);

} // namespace ptn
