#pragma once

#include "netid/types.hpp"

#include <array>
#include <cstdint>

namespace netid {

// Seeded random stream, reproducible across platforms.
//
// Algorithm: xoshiro256++ (Blackman/Vigna), state initialized from the
// 64-bit seed by four rounds of splitmix64. All derived draws are defined
// purely in terms of the integer output:
//   - next_double(): top 53 bits scaled to [0,1)
//   - uniform(lo,hi): affine map of next_double()
//   - gauss(m,s):   Box-Muller on two fresh uniforms (no caching, so one
//                   gaussian always consumes exactly two integer draws)
//
// A stream is single-consumer. Parallel work takes independent child
// streams from split(), which hashes (seed, index) through splitmix64.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform in [0,1), 53-bit resolution.
    double next_double();

    /// Uniform in [lo,hi). Requires lo < hi.
    double uniform(double lo, double hi);

    /// Gaussian with the given mean and standard deviation. Requires std >= 0.
    double gauss(double mean, double std);

    /// Independent child stream; deterministic in (seed, index).
    RngStream split(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

}  // namespace netid
