#pragma once

#include <burstlab/error.hpp>
#include <burstlab/fft.hpp>
#include <burstlab/series.hpp>

#include <cstddef>
#include <numeric>
#include <vector>

namespace burstlab {

/// One-sided power spectral density on the positive frequencies k / (L dt).
struct PsdEstimate {
    std::vector<double> freqs;
    std::vector<double> power;
    std::size_t n_segments = 0;
};

/// Segment-averaged periodogram: global mean removed, rectangular window, no
/// overlap, density normalized so that sum(power) * df approximates the variance.
inline PsdEstimate estimate_psd(const TimeSeries& s, std::size_t n_segments) {
    detail::require(n_segments >= 1, "estimate_psd: n_segments must be >= 1");
    if (s.size() < 16 * n_segments)
        throw InsufficientDataError("estimate_psd: series shorter than 16 samples per segment");

    const std::size_t len = s.size() / n_segments;
    const std::size_t used = len * n_segments;
    const double mean = std::accumulate(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(used), 0.0) /
                        static_cast<double>(used);

    fft::RealTransform transform(len);
    const std::size_t n_freq = len / 2;  // k = 1 .. len/2
    std::vector<double> acc(n_freq, 0.0);
    auto in = transform.input();
    for (std::size_t seg = 0; seg < n_segments; ++seg) {
        const double* src = s.values.data() + seg * len;
        for (std::size_t i = 0; i < len; ++i) in[i] = src[i] - mean;
        transform.execute();
        const auto out = transform.output();
        for (std::size_t k = 1; k <= n_freq; ++k) acc[k - 1] += std::norm(out[k]);
    }

    PsdEstimate est;
    est.n_segments = n_segments;
    est.freqs.resize(n_freq);
    est.power.resize(n_freq);
    const double norm = s.dt / (static_cast<double>(len) * static_cast<double>(n_segments));
    for (std::size_t k = 1; k <= n_freq; ++k) {
        // Bins other than Nyquist carry their negative-frequency twin.
        const bool nyquist = (len % 2 == 0) && k == n_freq;
        est.freqs[k - 1] = static_cast<double>(k) / (static_cast<double>(len) * s.dt);
        est.power[k - 1] = (nyquist ? 1.0 : 2.0) * norm * acc[k - 1];
    }
    return est;
}

inline double frequency_step(const PsdEstimate& p) { return p.freqs.empty() ? 0.0 : p.freqs.front(); }

}  // namespace burstlab
