#pragma once

#include <cstdint>

namespace overlapkit {

// Counter-based pseudo-random stream built on splitmix64. Streams derived
// from (seed, key...) are independent for practical purposes and fully
// reproducible across platforms, which is what makes parallel bootstrap
// replicates bit-identical to serial execution.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(splitmix64(seed)) {}

    RngStream(std::uint64_t seed, std::uint64_t k1)
        : state_(splitmix64(hash_combine(seed, k1))) {}

    RngStream(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2)
        : state_(splitmix64(hash_combine(hash_combine(seed, k1), k2))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform on (0,1), never exactly 0 or 1
    double next_uniform() {
        double u = (next_u64() >> 11) * 0x1.0p-53;
        if (u <= 0.0) u = 0x1.0p-53;
        return u;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // rejection to avoid modulo bias
        std::uint64_t threshold = (~n + 1) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double next_normal();  // inverse-CDF, defined in numerics.cpp

private:
    std::uint64_t state_;
};

}  // namespace overlapkit
