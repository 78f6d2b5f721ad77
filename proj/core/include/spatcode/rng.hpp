#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spatcode {

// Seeded random source used everywhere randomness is needed.
//
// std::uniform_real_distribution and std::normal_distribution are allowed to
// differ between standard library implementations, which would break the
// byte-for-byte reproducibility contract.  This wrapper derives all variates
// directly from the mt19937_64 bit stream, so a seed pins the exact sequence
// on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits of mantissa.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform index in [0, n).  Modulo bias is below 2^-40 for any n that fits
    // in desk-scale corpora and does not matter for data generation.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so consecutive calls consume the engine at a fixed rate.
    double normal01() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spatcode
