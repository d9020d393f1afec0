#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>

namespace hetspec {

// SplitMix64 finalizer; avalanches a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream domains keep independent consumers of the same seed from colliding.
namespace streams {
inline constexpr std::uint64_t signal_trace = 0x51;
inline constexpr std::uint64_t noise_trace = 0x4e;
inline constexpr std::uint64_t bootstrap = 0x42;
inline constexpr std::uint64_t sweep_point = 0x53;
inline constexpr std::uint64_t probe_mode = 0x50;
}  // namespace streams

// Key for the (seed, domain, index) stream. Batches regenerate bit-identically
// because every trace draws from its own key, independent of scheduling.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t domain,
                                   std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ domain) ^ index);
}

// xoshiro256++ with all transforms (uniform, normal) done in-house so that
// results do not depend on standard-library distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) {
    std::uint64_t x = key;
    for (auto& s : state_) s = mix64(x++);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_uniform_nonzero() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Index in [0, n) by multiply-shift. The O(n / 2^64) bias is far below
  // anything observable; in exchange every draw consumes exactly one word.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Box-Muller pair of independent standard normals.
  std::pair<double, double> next_normal_pair() {
    const double u1 = next_uniform_nonzero();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Circular complex normal with E|z|^2 = complex_variance.
  std::complex<double> next_complex_normal(double complex_variance) {
    const auto [x, y] = next_normal_pair();
    const double s = std::sqrt(0.5 * complex_variance);
    return {s * x, s * y};
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace hetspec
