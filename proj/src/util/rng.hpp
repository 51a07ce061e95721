#pragma once
#include <cstdint>
#include <initializer_list>

namespace ptn {

// Counter-based splittable random stream.  A stream is identified by a key
// derived from (seed, label...) and draws are pure functions of
// (key, counter), so replicas and noise modes can be assigned independent
// streams whose output does not depend on evaluation order or thread
// schedule.
struct RngStream {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    static std::uint64_t mix(std::uint64_t x);

    // Child stream: deterministic function of this stream's key and a label.
    RngStream child(std::uint64_t label) const;
    static RngStream root(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();            // in (0,1)
    double normal();
    void normal_pair(double& a, double& b);

private:
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace ptn
