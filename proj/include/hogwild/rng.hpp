#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace hogwild {

// splitmix64 finalizer; used to derive independent stream seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags for the per-run RNG streams. Keeping draws in separate streams
// means e.g. the sample sequence xi_t is identical across runs that differ
// only in mask policy or partition parameter.
enum : std::uint64_t {
  kStreamSamples = 0x5a01,
  kStreamMasks = 0x5a02,
  kStreamFilters = 0x5a03,
  kStreamData = 0x5a04,
  kStreamPartition = 0x5a05,
};

// mt19937_64 with hand-rolled output transforms. The engine's sequence is
// pinned by the standard; std::*_distribution is not, so we avoid it to keep
// traces bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [0, n) without modulo bias.
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::next_index: n = 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Box-Muller, cosine branch only so each normal consumes exactly two words.
  double next_normal() {
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hogwild
