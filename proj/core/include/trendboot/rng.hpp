#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace trendboot {

using Engine = std::mt19937_64;

// Ziggurat sampler; several times faster than std::normal_distribution on libstdc++.
using NormalDistribution = boost::random::normal_distribution<double>;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, stable across platforms and standard library versions.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(seed ^ hash_label(stream)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Independent engine for the named stream `stream` and work item `index`.
/// Every random draw in the library goes through a substream so results do
/// not depend on scheduling order or thread count.
inline Engine substream(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
  return Engine(derive_seed(seed, stream, index));
}

}  // namespace trendboot
