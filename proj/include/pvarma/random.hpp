#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pvarma {

/// splitmix64 finalizer. Used to derive independent substream seeds from one
/// master seed so that results never depend on evaluation order.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream identified by `keys` under `master`.
inline std::uint64_t substream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = mix64(master);
    for (auto k : keys) {
        s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
    }
    return s;
}

using Rng = std::mt19937_64;

}  // namespace pvarma
