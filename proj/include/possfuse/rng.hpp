#pragma once

// Seeding scheme for every Monte Carlo loop in the library.
//
// Replicates are grouped into fixed blocks of kBlockSize. Block b of stream s
// under user seed S draws from std::mt19937_64 seeded with
// derive_seed(S, s, b). Block boundaries depend only on the replicate count,
// never on the thread count, so any schedule reproduces the sequential run
// bit for bit.

#include <cstddef>
#include <cstdint>
#include <random>

namespace possfuse {

inline constexpr std::size_t kBlockSize = 1024;

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

// Named streams so unrelated simulations under one seed never share draws.
namespace stream {
inline constexpr std::uint64_t mc_rule = 0x6d63'7275'6c65ULL;
inline constexpr std::uint64_t validity = 0x7661'6c69'6474ULL;
inline constexpr std::uint64_t impossibility = 0x696d'706f'7373ULL;
inline constexpr std::uint64_t pivot_table = 0x7069'766f'7474ULL;
inline constexpr std::uint64_t pivot_direct = 0x7069'7664'6972ULL;
inline constexpr std::uint64_t exp_contour_mc = 0x6578'706d'6363ULL;
inline constexpr std::uint64_t meta_sim = 0x6d65'7461'7369ULL;
inline constexpr std::uint64_t permute = 0x7065'726d'7574ULL;
}  // namespace stream

using Engine = std::mt19937_64;

inline Engine block_engine(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t block) {
    return Engine(derive_seed(seed, stream_id, block));
}

// Uniform on the open interval (0,1): (k + 1/2) * 2^-53. Never 0, never 1,
// so log() and the normal quantile are always finite.
inline double uniform_open(Engine& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Engine& eng) {
    std::normal_distribution<double> d;
    return d(eng);
}

inline double gamma_draw(Engine& eng, double shape) {
    std::gamma_distribution<double> d(shape, 1.0);
    return d(eng);
}

}  // namespace possfuse
