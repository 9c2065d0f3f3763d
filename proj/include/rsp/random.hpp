#ifndef RSP_RANDOM_HPP
#define RSP_RANDOM_HPP

// Seeded randomness helpers. The standard distributions are implementation
// defined, so the draws used by the simulations are built directly on the
// engine output to keep seeded runs identical across toolchains.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "rsp/linalg.hpp"

namespace rsp {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
template <class Engine>
double uniform01(Engine& rng) {
  static_assert(Engine::max() - Engine::min() == UINT64_MAX, "expects a 64-bit engine");
  return static_cast<double>((rng() - Engine::min()) >> 11) * 0x1.0p-53;
}

// Index k such that sum_{j<k} probs[j] <= u < sum_{j<=k} probs[j]; the last
// index with positive weight absorbs rounding at the top end.
template <std::size_t N>
std::size_t sample_discrete(const std::array<double, N>& probs, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (probs[k] <= 0.0) continue;
    last = k;
    acc += probs[k];
    if (u < acc) return k;
  }
  return last;
}

// SplitMix64 finalizer; gives independent per-trial streams from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform direction on the unit sphere (uniform z, uniform azimuth).
template <class Engine>
Vec3 random_unit_vector(Engine& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * 3.14159265358979323846 * uniform01(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace rsp

#endif  // RSP_RANDOM_HPP
