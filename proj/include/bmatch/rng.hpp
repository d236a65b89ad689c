#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace bmatch {

// Deterministic random source. All draws go through next_u64 so that a seed
// reproduces the same stream on any platform; the std:: distribution adapters
// do not make that promise.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= reject_below) return static_cast<std::size_t>(r % bound);
    }
  }

  // Uniform over [0, 1) with 53 bits of precision.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bmatch
