#include "util/rng.hpp"

#include <cmath>

namespace ptn {

std::uint64_t RngStream::mix(std::uint64_t x) {
    // splitmix64 finalizer (Steele, Lea, Flood 2014)
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27; x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

RngStream RngStream::root(std::uint64_t seed) {
    RngStream s;
    s.key = mix(seed + 0x9e3779b97f4a7c15ULL);
    return s;
}

RngStream RngStream::child(std::uint64_t label) const {
    RngStream s;
    s.key = mix(key ^ mix(label + 0x9e3779b97f4a7c15ULL));
    return s;
}

std::uint64_t RngStream::next_u64() {
    return mix(key + (++counter) * 0x9e3779b97f4a7c15ULL);
}

double RngStream::uniform() {
    // 53-bit mantissa, offset by half an ulp so the value lies in (0,1)
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

void RngStream::normal_pair(double& a, double& b) {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(6.283185307179586476925286766559 * u2);
    b = r * std::sin(6.283185307179586476925286766559 * u2);
}

double RngStream::normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_;
    }
    double a, b;
    normal_pair(a, b);
    cached_ = b;
    have_cached_ = true;
    return a;
}

} // namespace ptn
