#pragma once

#include <cstdint>
#include <random>

namespace abcnet {

// Seeded uniform draw source. All distributions are derived from raw
// mt19937_64 output by fixed arithmetic, so the draw sequence for a given
// seed is identical across standard library implementations.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    // uniform on [0,1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on [lo,hi)
    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // uniform on [-1,1]
    double uniform_sym() {
        return uniform(-1.0, 1.0);
    }

    // uniform integer on [0, n)
    std::size_t index(std::size_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace abcnet
