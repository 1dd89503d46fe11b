// Deterministic random streams.
//
// Every run draws from one SplitMix64 stream. The stream state advances by the
// golden-ratio increment and each output is the Stafford "mix13" finalizer of
// the state, so any implementation of the same two functions reproduces the
// exact sequence:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Uniform reals take the top 53 bits: (next() >> 11) * 2^-53, giving [0, 1).

#pragma once

#include <cstdint>
#include <string_view>

namespace smsim {

// The SplitMix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for run `run_index` of a configuration with digest `config_digest`:
//
//   a = mix64(master_seed)
//   b = mix64(a ^ (run_index * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019))
//   return mix64(b ^ config_digest)
//
// For fixed master seed and digest the map is injective in run_index.
constexpr std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index,
                                        std::uint64_t config_digest) noexcept {
    const std::uint64_t a = mix64(master_seed);
    const std::uint64_t b = mix64(a ^ (run_index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
    return mix64(b ^ config_digest);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Multiply-shift reduction; bias is below 2^-32 for
    // the bounds used here.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
    }

    using result_type = std::uint64_t;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    constexpr result_type operator()() noexcept { return next(); }

private:
    std::uint64_t state_;
};

// FNV-1a, 64-bit. Used for configuration digests.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace smsim
