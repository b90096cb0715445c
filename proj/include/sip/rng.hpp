#pragma once

#include <cstdint>

namespace sip::rng {

/// Counter-based generator: output i is the splitmix64 finalizer applied to
/// key + i*gamma.  Substreams are derived by hashing (seed, stream), so
/// replications draw from independent streams regardless of evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed);

    /// Independent substream for a (seed, stream) pair.
    static CounterRng substream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform deviate strictly inside (0,1).
    double uniform();

    /// Standard normal by inverse CDF (Wichura's PPND16 algorithm).
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Inverse standard normal CDF, accurate to ~1e-15 on (0,1).
double inverse_normal_cdf(double p);

}  // namespace sip::rng
