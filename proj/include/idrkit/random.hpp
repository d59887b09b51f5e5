#pragma once

#include <cstdint>
#include <random>

namespace idrkit {

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for sub-stream `stream` of `seed`; identical arguments give
/// identical sequences regardless of which thread consumes them.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
    return std::mt19937_64(mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ (substream * 0x632be59bd9b4e019ULL)));
}

}  // namespace idrkit
