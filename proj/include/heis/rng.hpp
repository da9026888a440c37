#pragma once

#include <cstdint>

namespace heis {

// SplitMix64 used in counter mode: value i of a stream is mix(seed + (i+1)*golden),
// which coincides with the i-th output of the sequential SplitMix64 generator.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t at(std::uint64_t i) const;
  std::uint64_t next() { return at(counter_++); }
  double uniform();  // [0, 1), 53 bits
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t below(std::uint64_t n);  // [0, n)
  double normal();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace heis
