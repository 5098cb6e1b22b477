#pragma once

#include <cstdint>

namespace socperc {

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's public-domain constants).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stateless counter-based draw: three mixing rounds over (seed, k1, k2).
// Random access by key is what makes coupling rows reproducible without
// storing any history.
inline constexpr std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t k1,
                                         std::uint64_t k2) {
    std::uint64_t z = mix64(seed + kGolden);
    z = mix64(z ^ (k1 + 0xbf67ae8584caa73bULL));
    z = mix64(z ^ (k2 + 0xc2b2ae3d27d4eb4fULL));
    return z;
}

inline constexpr double u64_to_unit(std::uint64_t x) {
    // 53-bit mantissa, uniform in [0, 1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline constexpr double keyed_unit(std::uint64_t seed, std::uint64_t k1,
                                   std::uint64_t k2) {
    return u64_to_unit(keyed_u64(seed, k1, k2));
}

// Sequential SplitMix64 stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    double next_unit() { return u64_to_unit(next_u64()); }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Unbiased integer in [0, n); rejection on the short tail.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t min = (0 - n) % n;
        std::uint64_t x = next_u64();
        while (x < min) x = next_u64();
        return x % n;
    }

    // Derive an independent seed for a sub-stream.
    std::uint64_t fork(std::uint64_t tag) { return keyed_u64(next_u64(), tag, 0x5eedULL); }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// Deterministic sub-seed for replica/chain dispatch.
inline constexpr std::uint64_t subseed(std::uint64_t seed, std::uint64_t index,
                                       std::uint64_t purpose) {
    return keyed_u64(seed, index, purpose);
}

}  // namespace socperc
