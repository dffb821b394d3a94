#pragma once

#include <burstlab/error.hpp>
#include <burstlab/fft.hpp>
#include <burstlab/random.hpp>
#include <burstlab/series.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace burstlab {

struct FbmConfig {
    double hurst = 0.5;
    double gamma_damp = 2.0;  ///< damping coefficient (1/time)
    double dt = 1e-3;
    std::int64_t n_steps = 1 << 20;
    std::uint64_t seed = 1;

    void validate() const {
        using detail::require;
        require(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0, "hurst must lie in (0, 1)");
        require(std::isfinite(gamma_damp) && gamma_damp >= 0.0, "gamma_damp must be >= 0");
        require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
        require(gamma_damp * dt < 1.0, "gamma_damp * dt must be < 1");
        require(n_steps >= 1, "n_steps must be >= 1");
    }
};

/// Fractional Gaussian noise plus the observability data of the approximation.
struct FgnResult {
    std::vector<double> values;
    double clipped_fraction = 0.0;  ///< share of the eigenvalue mass clipped to zero
    std::size_t embedding_size = 0;

    bool stressed() const noexcept { return clipped_fraction > 0.01; }
};

/// Autocovariance of unit-variance fGn at lag k.
inline double fgn_autocovariance(double hurst, double k) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) + std::pow(std::abs(k - 1.0), h2));
}

/// Approximate circulant generator for fGn of length n.
///
/// The covariance is embedded in a circulant of power-of-two size m >= 2(n-1).
/// Its eigenvalues are the DFT of the first row; negative ones are set to zero (the
/// approximate variant) and the clipped share of total eigenvalue mass is reported.
/// Samples are Re F(sqrt(lambda/m) Z) with Z complex standard normal.
inline FgnResult fgn(double hurst, std::int64_t n, std::uint64_t seed) {
    detail::require(hurst > 0.0 && hurst < 1.0, "fgn: hurst must lie in (0, 1)");
    detail::require(n >= 2, "fgn: length must be >= 2");

    std::size_t m = 2;
    while (m < 2 * static_cast<std::size_t>(n - 1)) m <<= 1;
    const std::size_t half = m / 2;

    fft::ComplexTransform transform(m);
    auto buf = transform.data();
    for (std::size_t k = 0; k <= half; ++k) buf[k] = fgn_autocovariance(hurst, static_cast<double>(k));
    for (std::size_t k = half + 1; k < m; ++k) buf[k] = buf[m - k];
    transform.execute();

    std::vector<double> lambda(m);
    double total_mass = 0.0, clipped_mass = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double l = buf[k].real();
        total_mass += std::abs(l);
        if (l < 0.0) {
            clipped_mass -= l;
            lambda[k] = 0.0;
        } else {
            lambda[k] = l;
        }
    }

    CounterRng rng(seed, stream::fgn);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double s = std::sqrt(lambda[k] * inv_m);
        const double re = rng.normal();
        const double im = rng.normal();
        buf[k] = {s * re, s * im};
    }
    transform.execute();

    FgnResult out;
    out.embedding_size = m;
    out.clipped_fraction = total_mass > 0.0 ? clipped_mass / total_mass : 0.0;
    out.values.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

struct FbmRun {
    TimeSeries series;
    double clipped_fraction = 0.0;
    std::size_t burn_in = 0;
};

/// Mean-reverting fBm x_{i+1} = x_i - gamma x_i dt + xi_i dt^H from x_0 = 0.
/// With gamma > 0 the first 1% of steps are burned in and discarded. The series
/// holds n_steps + 1 samples starting at t = 0.
inline FbmRun simulate_fbm_biased_run(const FbmConfig& c) {
    c.validate();
    const std::size_t burn = c.gamma_damp > 0.0 ? static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(c.n_steps))) : 0;
    const std::size_t steps = static_cast<std::size_t>(c.n_steps) + burn;
    const FgnResult noise = fgn(c.hurst, static_cast<std::int64_t>(std::max<std::size_t>(steps, 2)), c.seed);

    const double decay = 1.0 - c.gamma_damp * c.dt;
    const double amp = std::pow(c.dt, c.hurst);
    FbmRun run;
    run.clipped_fraction = noise.clipped_fraction;
    run.burn_in = burn;
    run.series = TimeSeries{0.0, c.dt, {}};
    run.series.values.reserve(static_cast<std::size_t>(c.n_steps) + 1);
    double x = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        if (i >= burn) run.series.values.push_back(x);
        x = decay * x + noise.values[i] * amp;
    }
    run.series.values.push_back(x);
    return run;
}

inline TimeSeries simulate_fbm_biased(const FbmConfig& c) { return simulate_fbm_biased_run(c).series; }

}  // namespace burstlab
