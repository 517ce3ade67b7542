#pragma once

#include <cstdint>
#include <random>

namespace covctl {

// Seeded generator with explicit, implementation-independent draw helpers so
// that identical seeds produce identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform double in [a, b).
  double uniform(double a, double b) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  // Uniform double in (a, b]: never returns a, may return b.
  double uniform_open_low(double a, double b) { return b - (b - a) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53); }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace covctl
