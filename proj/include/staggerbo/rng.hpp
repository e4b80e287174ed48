#pragma once

#include <cstdint>

namespace stagger {

/// Counter-based 64-bit random stream. A stream is identified by
/// (seed, stream id); equal identifiers reproduce the identical draw
/// sequence and distinct stream ids give statistically independent
/// streams, so concurrent workers can each own a fork() of one root
/// stream without sharing mutable state.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform on (0, 1].
    double uniform_open0();

    /// Standard normal via Box-Muller (consumes two uniforms).
    double normal();

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Derived independent stream; fork(i) != fork(j) for i != j and both
    /// are independent of the parent's future output.
    RngStream fork(std::uint64_t idx) const;

    bool operator==(const RngStream&) const = default;

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t state_ = 0;
};

/// Stateless mix of two words; used to derive stream ids from indices.
std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b);

}  // namespace stagger
