#pragma once

#include <cstdint>
#include <random>

namespace pinsim {

/// Seeded random stream. Every consumer that may run concurrently owns its own
/// instance; independent streams are derived from a root seed and a stream id.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    /// Stream `stream_id` of the family rooted at `seed`. Streams with different
    /// ids are statistically independent and do not depend on creation order.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

    double uniform();  // [0, 1)
    double normal();   // N(0, 1)
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pinsim
