#pragma once

#include <cstdint>
#include <random>

namespace polyvem {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is
/// fixed by the standard). Real draws use the top 53 bits directly so results
/// do not depend on the library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace polyvem
