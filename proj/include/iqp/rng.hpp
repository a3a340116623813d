#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace iqp {

// Deterministic random source. mt19937_64 output is fully pinned by the
// standard, and all derived draws below avoid std::*_distribution (whose
// results vary between library implementations), so a seed reproduces the
// same stream on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        // Masked rejection: unbiased and implementation-independent.
        std::uint64_t mask = ~std::uint64_t{0};
        if (bound > 1) {
            int bits = 64 - std::countl_zero(bound - 1);
            mask = (bits == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
        } else {
            return 0;
        }
        while (true) {
            std::uint64_t v = next_u64() & mask;
            if (v < bound) {
                return v;
            }
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace iqp
