#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kpz {

// Philox4x32-10 (Salmon et al.). Stateless: output is a pure function of key and counter.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;
    static Counter block(Counter ctr, Key key) noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Hash a master seed with a path of stream labels into a child seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

// Counter-based stream. The key is the (derived) seed, the high counter words
// carry the stream id and the low words count draws, so streams with distinct
// ids never overlap and can be consumed in any order across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;        // (0, 1), never 0 or 1
    double normal() noexcept;         // N(0,1), Box-Muller
    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
    double exponential(double rate) noexcept;
    double gamma(double shape) noexcept;  // Marsaglia-Tsang, scale 1
    std::uint64_t poisson(double mean) noexcept;

    // A child stream keyed off this one's seed; independent of the parent sequence.
    RngStream substream(std::uint64_t label) const noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    Philox4x32::Key key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace kpz
