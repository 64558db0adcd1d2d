#pragma once

/**
 * @file rng.hpp
 * @brief xorshift64* generator used for all sample sets.
 *
 * State update x ^= x >> 12; x ^= x << 25; x ^= x >> 27, output
 * x * 0x2545F4914F6CDD1D. Uniform reals take the top 53 output bits.
 * Fixed here (not std::mt19937 + distributions) so point sets are identical
 * across standard libraries.
 */

#include <cstdint>

namespace ppc {

class Xorshift64Star {
public:
  /// A zero seed would stall the generator; it is replaced by a fixed odd constant.
  explicit Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? 0x9E3779B97F4A7C15ULL : seed) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

} // namespace ppc
