#pragma once

#include <cstdint>

namespace fppgeo {

// Stateless keyed hashing used as a counter-based generator: every random
// quantity of a field is a pure function of (seed, stream, site, slot), so
// nested windows sampled with one seed agree on their common sites.
namespace rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// Independent child seed for replica `index` of an experiment seeded with `seed`.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(stream_key(seed, 0x5EEDULL) ^ mix64(index + 1));
}

// Injective packing of a lattice coordinate pair (32 bits each).
constexpr std::uint64_t pack(std::int64_t x, std::int64_t t) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
}

// Key-independent scrambling of a site; combine with a stream key via keyed().
constexpr std::uint64_t site_code(std::int64_t x, std::int64_t t) noexcept {
    return mix64(pack(x, t) + 0x632BE59BD9B4E019ULL);
}

constexpr std::uint64_t keyed(std::uint64_t key, std::uint64_t code) noexcept {
    return mix64(key ^ code);
}

constexpr std::uint64_t site_hash(std::uint64_t key, std::int64_t x, std::int64_t t) noexcept {
    return keyed(key, site_code(x, t));
}

constexpr std::uint64_t slot_hash(std::uint64_t site, std::uint64_t slot) noexcept {
    return mix64(site + (slot + 1) * 0x9E3779B97F4A7C15ULL);
}

// [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// (0, 1) with 53 random bits.
constexpr double to_open_unit(std::uint64_t h) noexcept {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace rng
} // namespace fppgeo
