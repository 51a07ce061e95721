#include "cli/manifest.hpp"

#include <chrono>
#include <ctime>

#include <sys/utsname.h>

namespace ptn {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::uint64_t config_digest(const nlohmann::json& cfg) {
    // nlohmann::json stores object keys sorted, so dump() is canonical.
    const std::string s = cfg.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

nlohmann::json make_manifest(const nlohmann::json& cfg, std::uint64_t seed,
                             const std::vector<std::string>& outputs) {
    nlohmann::json m;
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(config_digest(cfg)));
    m["config_digest"] = digest;
    m["seed"] = seed;
    m["version"] = kVersion;
    m["timestamp"] = iso_now();
    utsname un{};
    if (uname(&un) == 0)
        m["host"] = std::string(un.sysname) + " " + un.machine;
    m["outputs"] = outputs;
    return m;
}

} // namespace ptn
