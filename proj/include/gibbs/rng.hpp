#pragma once

#include <cstdint>
#include <random>

namespace gibbs {

/// Seeded random stream; identical (seed, stream) pairs reproduce identical
/// paths. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform on [a, b).
  double uniform(double a, double b);
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  std::uint64_t poisson(double mean);
  std::uint64_t binomial(std::uint64_t trials, double p);

  /// Independent stream derived from this one's (seed, stream) and `k`.
  RngStream child(std::uint64_t k) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gibbs
