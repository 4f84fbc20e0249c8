#ifndef MITOFUSE_RANDOM_HPP
#define MITOFUSE_RANDOM_HPP

#include <cstdint>
#include <random>

namespace mitofuse {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed plus per-operation sequence id. Each (seed, sequence) pair names an
// independent random stream, so batch items can be processed in any order.
struct AugSeed {
  std::uint64_t seed = 0;
  std::uint64_t sequence = 0;

  AugSeed next() const { return AugSeed{seed, sequence + 1}; }
};

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(mix64(mix64(seed) ^ stream)); }
inline Rng make_rng(const AugSeed& s) { return make_rng(s.seed, s.sequence); }

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace mitofuse

#endif  // MITOFUSE_RANDOM_HPP
