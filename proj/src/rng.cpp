#include "staggerbo/rng.hpp"

#include <cmath>
#include <numbers>

namespace stagger {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

std::uint64_t splitmix_step(std::uint64_t& state) {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix_step(s);
    s ^= b + kGolden + (h << 6) + (h >> 2);
    h ^= splitmix_step(s);
    return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), state_(hash_mix(seed, hash_mix(stream, 0x5354414747455221ull))) {}

std::uint64_t RngStream::next_u64() { return splitmix_step(state_); }

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open0() { return 1.0 - uniform(); }

double RngStream::normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    // Rejection-free multiply-shift; bias is negligible for n << 2^64.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

RngStream RngStream::fork(std::uint64_t idx) const {
    return RngStream(hash_mix(seed_, hash_mix(stream_, 0x464f524bull)), hash_mix(idx, 0x6368696c64ull));
}

}  // namespace stagger
