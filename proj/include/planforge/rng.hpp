#pragma once

#include <cstdint>
#include <random>

namespace planforge {

// Deterministic uniform source shared by every randomized component.
//
// std::mt19937_64 has a standard-mandated output sequence, and the [0,1)
// mapping below keeps the top 53 bits of each draw, so a given seed yields
// the same stream of reals on every platform and compiler. (The stdlib
// distributions are not specified bit-exactly, hence the explicit mapping.)
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform real in [0,1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi) {
    const double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
    int offset = static_cast<int>(uniform() * span);
    if (offset > hi - lo) offset = hi - lo;  // guard the open upper bound
    return lo + offset;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace planforge
