#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace anosov {

// Every data-parallel kernel takes an Exec so tests can compare it with the serial reference.
enum class Exec { Serial, Parallel };

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < nn; ++i) body(static_cast<std::size_t>(i));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: the same (seed, stream) pair gives the same engine on any thread.
inline std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

inline double uniform01(std::mt19937_64& g) {
  // 53 random bits, platform independent (std::uniform_real_distribution is not)
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double a, double b) { return a + (b - a) * uniform01(g); }

}  // namespace anosov
