#pragma once

#include <cstdint>
#include <random>

namespace pfl {

// Named consumers of the run seed. New diagnostics take new ids; existing ids
// never change, so adding a consumer leaves every other stream untouched.
enum class Stream : std::uint64_t {
    speckle = 1,
    signal_noise = 2,
    reference_noise = 3,
    ensemble = 4,
    initial_noise = 5,
};

/// Counter-based derivation: splitmix64 finalizer applied to
/// seed ^ mix(stream) ^ mix(index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    return derive_seed(seed, static_cast<std::uint64_t>(stream), index);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace pfl
