#pragma once
// Deterministic RNG: a seeded master stream plus derived per-worker streams.
// All Monte Carlo paths draw through this wrapper so that identical seeds give
// bit-identical results regardless of platform libstdc++ distribution quirks.

#include <cmath>
#include <cstdint>
#include <random>

namespace hv {

class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : eng_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    // Uniform in [0,1) with 53 random bits (explicit construction, portable).
    double uniform() {
        std::uint64_t bits = eng_() >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double normal() {
        // Box-Muller; cache the second variate.
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    std::uint64_t bits() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hv
