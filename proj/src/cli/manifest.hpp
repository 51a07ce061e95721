#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ptn {

// FNV-1a over the canonical (sorted-key) serialization, so the digest is
// stable under key reordering of the input document.
std::uint64_t config_digest(const nlohmann::json& cfg);

// Run manifest: digest, seed, version, timestamps, host, output list.
// Timestamps/host are provenance only and excluded from determinism
// comparisons; everything else is a pure function of the run.
nlohmann::json make_manifest(const nlohmann::json& cfg, std::uint64_t seed,
                             const std::vector<std::string>& outputs);

} // namespace ptn
