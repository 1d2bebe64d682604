#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cac {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// One independent mt19937_64 stream per purpose, keyed by (master seed, offset).
/// Variates are built from raw 64-bit draws so results do not depend on the
/// standard library's distribution implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t offset)
        : engine_(splitmix64(master_seed ^ splitmix64(offset))) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

// Fixed stream offsets derived from the master seed.
namespace stream {
inline constexpr std::uint64_t kNewArrivals = 1;
inline constexpr std::uint64_t kHandoffArrivals = 2;
inline constexpr std::uint64_t kHolding = 3;
inline constexpr std::uint64_t kDepartureType = 4;
inline constexpr std::uint64_t kAdmission = 5;
}  // namespace stream

}  // namespace cac
