#ifndef JPMINHASH_HASHING_HPP
#define JPMINHASH_HASHING_HPP

#include <bit>
#include <cstdint>
#include <string_view>

namespace jpminhash {

struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

/// 64-bit avalanche finalizer (MurmurHash3 fmix64).
constexpr std::uint64_t fin64(std::uint64_t z) noexcept {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDULL;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ULL;
    z ^= z >> 33;
    return z;
}

/// Maps (element, seed) to a uniform double in (0, 1]. Bit-exact:
/// z = fin64(fin64(element ^ rotl(seed, 32)) + seed), u = ((z >> 11) + 1) * 2^-53.
constexpr double uniform_hash(std::uint64_t element, Seed seed) noexcept {
    const std::uint64_t z = fin64(fin64(element ^ std::rotl(seed.value, 32)) + seed.value);
    return static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
}

/// j-th seed of the family rooted at `base`.
constexpr Seed derive_seed(Seed base, std::uint64_t j) noexcept {
    return Seed{fin64(base.value + j * 0x9E3779B97F4A7C15ULL)};
}

/// Stable element id of a token: the UTF-8 bytes are read as little-endian
/// 8-byte words (last word zero padded) and folded as h = fin64(h ^ word),
/// starting from the byte length.
std::uint64_t token_id(std::string_view token) noexcept;

} // namespace jpminhash

#endif
