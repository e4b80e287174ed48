#include "staggerbo/domain.hpp"

#include <boost/random/sobol.hpp>
#include <stdexcept>
#include <vector>

namespace stagger {

namespace {

std::uint32_t reverse_bits32(std::uint32_t v) {
    v = (v << 16) | (v >> 16);
    v = ((v & 0x00ff00ffu) << 8) | ((v & 0xff00ff00u) >> 8);
    v = ((v & 0x0f0f0f0fu) << 4) | ((v & 0xf0f0f0f0u) >> 4);
    v = ((v & 0x33333333u) << 2) | ((v & 0xccccccccu) >> 2);
    v = ((v & 0x55555555u) << 1) | ((v & 0xaaaaaaaau) >> 1);
    return v;
}

// Laine-Karras style hash in reversed-bit space: an Owen scramble of the
// binary radical inverse, keyed per dimension.
std::uint32_t owen_scramble(std::uint32_t x, std::uint32_t key) {
    x = reverse_bits32(x);
    x += key;
    x ^= x * 0x6c50b47cu;
    x ^= x * 0xb82f1e52u;
    x ^= x * 0xc7afe638u;
    x ^= x * 0x8d22f6e6u;
    return reverse_bits32(x);
}

}  // namespace

Point uniform_point(RngStream& rng, int d) {
    if (d < 1) throw std::invalid_argument("uniform_point: dimension must be >= 1");
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform();
    return x;
}

PointSet sobol_points(int n, int d, RngStream rng, std::int64_t offset) {
    if (d < 1) throw std::invalid_argument("sobol_points: dimension must be >= 1");
    if (n < 0) throw std::invalid_argument("sobol_points: negative count");
    if (offset < 0) throw std::invalid_argument("sobol_points: negative offset");
    PointSet pts(n, d);
    if (n == 0) return pts;

    std::vector<std::uint32_t> keys(static_cast<std::size_t>(d));
    for (auto& k : keys) k = static_cast<std::uint32_t>(rng.next_u64() >> 32);

    boost::random::sobol eng(static_cast<std::size_t>(d));
    if (offset > 0) eng.discard(static_cast<std::uint64_t>(offset) * static_cast<std::uint64_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            const auto raw = static_cast<std::uint32_t>(eng() >> 32);
            const auto scrambled = owen_scramble(raw, keys[static_cast<std::size_t>(k)]);
            pts(i, k) = (static_cast<double>(scrambled) + 0.5) * 0x1.0p-32;
        }
    }
    return pts;
}

}  // namespace stagger
