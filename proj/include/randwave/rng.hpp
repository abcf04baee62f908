#pragma once

// Counter-based random numbers. Every draw is a pure function of a 64-bit key
// and a 128-bit counter, so results do not depend on scheduling or on how many
// draws other replicates made.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

namespace randwave::rng {

using Counter = std::array<std::uint32_t, 4>;

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3").
inline Counter philox4x32(Counter ctr, std::uint64_t key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  auto k0 = static_cast<std::uint32_t>(key);
  auto k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used to derive stream keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a hash of an identifier.
inline std::uint64_t hash_id(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Stream key for experiment `id` under `master` seed.
inline std::uint64_t derive_key(std::uint64_t master, std::string_view id) {
  return mix64(master ^ mix64(hash_id(id)));
}

// 53-bit uniform in (0, 1].
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals from one Philox block (Box-Muller).
inline std::pair<double, double> normal_pair(std::uint64_t key, const Counter& ctr) {
  const Counter r = philox4x32(ctr, key);
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

/// Uniform (0, 1] pair from one block.
inline std::pair<double, double> uniform_pair(std::uint64_t key, const Counter& ctr) {
  const Counter r = philox4x32(ctr, key);
  return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

/// Counter layout shared by the samplers: (index, degree, replicate lo, replicate hi).
inline Counter make_counter(std::uint64_t index, std::uint64_t degree, std::uint64_t replicate) {
  return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(degree),
          static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32)};
}

}  // namespace randwave::rng
