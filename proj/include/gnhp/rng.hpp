#pragma once

#include <cstdint>
#include <random>

namespace gnhp {

// splitmix64 step, used to derive decorrelated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream: mixes a base seed with one or two stream ids so
// that replicates / families draw from independent generators.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t id_a,
                                 std::uint64_t id_b = 0) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= 0xd1b54a32d192ed03ULL * (id_a + 1);
  (void)splitmix64(s);
  s ^= 0x8cb92ba72f3d8dd7ULL * (id_b + 1);
  return std::mt19937_64(splitmix64(s));
}

}  // namespace gnhp
