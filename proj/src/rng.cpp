#include "gibbs/rng.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "gibbs/error.hpp"

namespace gibbs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double RngStream::uniform() {
  // 53 random bits centred in their cell: never 0, never 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
  const double v = a + (b - a) * uniform();
  return v < b ? v : a;
}

std::uint64_t RngStream::index(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "index range must be nonempty");
  return boost::random::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  return static_cast<std::uint64_t>(boost::random::poisson_distribution<std::int64_t, double>(mean)(engine_));
}

std::uint64_t RngStream::binomial(std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "binomial p must lie in [0,1]");
  return static_cast<std::uint64_t>(boost::random::binomial_distribution<std::int64_t, double>(static_cast<std::int64_t>(trials), p)(engine_));
}

RngStream RngStream::child(std::uint64_t k) const {
  return RngStream(seed_, splitmix64(splitmix64(stream_) ^ splitmix64(k + 0x632BE59BD9B4E019ULL)));
}

}  // namespace gibbs
