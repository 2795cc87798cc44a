#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace emas {

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable, splittable random stream. Every stochastic operation in the
/// library takes one of these explicitly; nothing draws from hidden state.
/// Satisfies UniformRandomBitGenerator so it can be handed to std::shuffle.
class RandomSource {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RandomSource(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Independent stream for (seed, stream) without consuming from a parent.
  static RandomSource derive(std::uint64_t seed, std::uint64_t stream) {
    return RandomSource(mix64(seed) ^ mix64(~stream));
  }

  /// Child stream; advances this one by a single draw.
  RandomSource split() { return RandomSource(engine_()); }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::bernoulli_distribution(p)(engine_);
  }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace emas
