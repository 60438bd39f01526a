#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hoi {

// Seeded generator with a fixed mapping from raw engine output to doubles.
// std::mt19937_64 output is fully specified by the standard, but the std
// distribution adaptors are not; doing the mapping here keeps every seeded
// result byte-identical across compilers and platforms.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unit-rate exponential via inversion; uniform01() < 1 keeps the log finite.
  double exponential() { return -std::log1p(-uniform01()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hoi
