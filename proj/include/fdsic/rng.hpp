#pragma once

#include <cstdint>
#include <random>

#include "fdsic/types.hpp"

namespace fdsic {

// splitmix64 mixer; chains (master seed, stream ids...) into independent
// stream seeds so every random draw is addressable by purpose rather than by
// evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id, Rest... rest) {
  return derive_seed(splitmix64(seed ^ splitmix64(id + 0x632be59bd9b4e019ull)), rest...);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double gaussian() { return normal_(gen_); }

  // circularly symmetric, unit total variance
  Complex cgaussian() {
    const double re = normal_(gen_);
    const double im = normal_(gen_);
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  double uniform() { return uniform_(gen_); }

  // unit-magnitude QPSK point
  Complex qpsk() {
    const auto bits = gen_() & 3u;
    return {(bits & 1u) ? kInvSqrt2 : -kInvSqrt2, (bits & 2u) ? kInvSqrt2 : -kInvSqrt2};
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fdsic
