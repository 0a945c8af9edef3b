#pragma once

#include <cstdint>
#include <random>

namespace ecp {

inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64-shot-seed";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for one shot, stable under any scheduling of shots.
inline std::mt19937_64 shot_engine(std::uint64_t seed, std::uint64_t shot) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ shot));
}

}  // namespace ecp
