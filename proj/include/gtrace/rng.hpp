#pragma once

#include <cstdint>
#include <random>

namespace gtrace {

// splitmix64 mix; used to derive independent seed streams from a base seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream));
}

// Seeded generator. All randomness in the library flows through one of these,
// passed in explicitly. Uniform helpers are implemented on raw 64-bit output
// so results do not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0,1) with 53-bit resolution
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

    // uniform integer in [0, n), n >= 1
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng split(std::uint64_t stream) {
        return Rng(derive_seed(next_u64(), stream));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gtrace
