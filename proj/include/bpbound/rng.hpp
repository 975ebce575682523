#pragma once

#include <cstdint>
#include <random>

namespace bpbound {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for the index-th independent stream under a master seed. Streams depend only on
// (master, index), never on which worker runs them.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) with 53 random bits; portable across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; portable across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

template <class Container>
void shuffle(Container& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace bpbound
