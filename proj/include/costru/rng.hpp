#pragma once

#include <cstdint>
#include <random>

namespace costru {

/// Purposes tag independent families of sub-streams inside one run.
enum class StreamPurpose : std::uint64_t {
    Decomposition = 1,
    Coordination = 2,
    Subsample = 3,
    Generator = 4,
    Evaluation = 5,
    Verification = 6,
    Reference = 7,
};

/// Mixes a purpose and up to two indices into a 64-bit stream id.
std::uint64_t stream_key(StreamPurpose purpose, std::uint64_t a = 0, std::uint64_t b = 0);

/// Reproducible random stream. Distinct (seed, stream_id) pairs seed the engine
/// through a SplitMix64 hash chain, so streams never share state.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
    std::uint64_t next_u64() { return engine_(); }
    std::mt19937_64& engine() { return engine_; }

    /// Child stream keyed by this stream's identity and a sub-key.
    RngStream derive(std::uint64_t sub_key) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

RngStream make_rng(std::uint64_t seed, std::uint64_t stream_id);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace costru
