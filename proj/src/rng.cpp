#include "heis/rng.hpp"

#include <cmath>
#include <numbers>

namespace heis {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(stream == 0 ? seed : mix(seed ^ mix(stream * kGolden))) {}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t i) const { return mix(seed_ + (i + 1) * kGolden); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Multiply-shift; bias is below 2^-64 * n, irrelevant here.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

double CounterRng::normal() {
  double u = uniform();
  while (u <= 0) u = uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace heis
