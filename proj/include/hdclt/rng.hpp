#pragma once

#include <bit>
#include <cstdint>

namespace hdclt {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Maps 52 random bits to (2k+1)/2^53, strictly inside (0,1); 1-u is exact too.
inline double bits_to_open_unit(std::uint64_t r) {
    return std::bit_cast<double>((r >> 12) | 0x3FF0000000000000ULL) - 1.0 + 0x1p-53;
}

struct Xoshiro256Plus {
    std::uint64_t s[4];

    // Independent stream per (seed, index): the index is the replication
    // number, so any partition of replications over workers draws the same
    // numbers.
    static Xoshiro256Plus for_stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t key = splitmix64(sm) ^ (index * 0xD1B54A32D192ED03ULL);
        Xoshiro256Plus g{};
        for (auto& w : g.s) w = splitmix64(key);
        return g;
    }

    std::uint64_t next() {
        const std::uint64_t result = s[0] + s[3];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = (s[3] << 45) | (s[3] >> 19);
        return result;
    }

    double uniform() { return bits_to_open_unit(next()); }
};

}  // namespace hdclt
