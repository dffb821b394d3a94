#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace burstlab {

/// Counter-based 64-bit generator: draw i of a stream is a pure function of (key, i).
///
/// The mixing function is the SplitMix64 finalizer applied to key + i * golden gamma.
/// Streams keyed from the same user seed but different tags are statistically
/// independent, so every job derives its own stream and results do not depend on
/// how jobs are scheduled across threads.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t tag = 0) noexcept
        : key_(mix(seed ^ mix(tag + 0x632BE59BD9B4E019ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + (counter_++) * kGamma); }

    std::uint64_t counter() const noexcept { return counter_; }
    std::uint64_t key() const noexcept { return key_; }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by the Marsaglia polar method (second variate cached).
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the u^(1/shape) boost.
    double gamma(double shape) noexcept {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
        }
    }

    double beta(double a, double b) noexcept {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream tags used by the engines, so one user seed fans out into disjoint streams.
namespace stream {
inline constexpr std::uint64_t initial_state = 1;
inline constexpr std::uint64_t wiener = 2;
inline constexpr std::uint64_t jumps = 3;
inline constexpr std::uint64_t fgn = 4;
}  // namespace stream

}  // namespace burstlab
