#pragma once

#include <cstdint>

namespace jumpfb {

/// 64-bit linear congruential generator
///   x_{k+1} = 6364136223846793005 * x_k + 1442695040888963407  (mod 2^64)
/// seeded with x_0 = seed. uniform() takes the top 53 bits of x_{k+1}.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    // in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

} // namespace jumpfb
