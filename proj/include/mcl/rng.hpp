#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mcl {

/// SplitMix64 finaliser (Steele, Lea & Flood 2014). Used only to derive
/// well-separated seeds for independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under master seed `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// MT19937-64 substream with portable variate conversion. The standard
/// distributions are implementation-defined, so uniforms and normals are
/// derived here to keep outputs identical across standard libraries.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : engine_(substream_seed(seed, stream)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::uint64_t index(std::uint64_t n) noexcept {
    const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Standard normal via Box-Muller; the second variate is discarded.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mcl
