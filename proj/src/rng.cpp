#include "costru/rng.hpp"

namespace costru {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(StreamPurpose purpose, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(purpose));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b + 0x632BE59BD9B4E019ULL));
    return h;
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
    const std::uint64_t h1 = splitmix64(seed);
    const std::uint64_t h2 = splitmix64(h1 ^ stream_id);
    std::seed_seq seq{static_cast<std::uint32_t>(h1), static_cast<std::uint32_t>(h1 >> 32),
                      static_cast<std::uint32_t>(h2), static_cast<std::uint32_t>(h2 >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

RngStream RngStream::derive(std::uint64_t sub_key) const {
    return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(sub_key)));
}

RngStream make_rng(std::uint64_t seed, std::uint64_t stream_id) { return RngStream(seed, stream_id); }

}  // namespace costru
