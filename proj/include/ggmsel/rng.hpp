#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace ggmsel {

// The <random> distributions are implementation-defined, so reruns on a
// different standard library could differ. Boost's are portable; the engine
// itself (mt19937_64) is fully specified by the standard.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream key from a base seed and a path of tags,
/// e.g. (seed, sample_size, replicate). A stream depends only on its key, so
/// tasks can run in any order or in parallel and still draw identical values.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {}) {
  const std::uint64_t key = stream_key(seed, tags);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return Engine(seq);
}

// Stream tags. Fixed values; changing one changes every seeded result.
namespace stream {
inline constexpr std::uint64_t bootstrap = 0xb0075;
inline constexpr std::uint64_t folds = 0xf01d5;
inline constexpr std::uint64_t truth = 0x7247;
inline constexpr std::uint64_t data = 0xda7a;
inline constexpr std::uint64_t diagonal = 0xd1a6;
}  // namespace stream

inline double uniform(Engine& engine, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine);
}

inline std::size_t uniform_index(Engine& engine, std::size_t size) {
  return boost::random::uniform_int_distribution<std::size_t>(0, size - 1)(engine);
}

inline double standard_normal(Engine& engine) {
  return boost::random::normal_distribution<double>(0.0, 1.0)(engine);
}

}  // namespace ggmsel
