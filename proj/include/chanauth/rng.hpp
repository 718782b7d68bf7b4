#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace chanauth {

/// SplitMix64 step; advances `state` and returns the next word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent child seed from a base seed and a salt.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t s = base;
    std::uint64_t mixed = splitmix64(s) ^ (salt * 0xff51afd7ed558ccdULL);
    return splitmix64(mixed);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return derive_seed(derive_seed(base, a, b), c);
}

/// Deterministic random stream. Uniform and Gaussian variates are computed
/// from raw engine words rather than <random> distributions, so a given seed
/// reproduces the same sequence on every standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift bounded draw; bias is negligible for n << 2^64.
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace chanauth
