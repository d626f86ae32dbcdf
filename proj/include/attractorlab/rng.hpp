#pragma once

#include <cstdint>
#include <random>

namespace attractorlab {

// Thin wrapper around mt19937_64 with portable distributions. The standard
// distributions are implementation-defined; deriving doubles directly from the
// raw 64-bit stream keeps outputs identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform01() - 1.0; }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace attractorlab
