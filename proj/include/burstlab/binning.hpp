#pragma once

#include <burstlab/durations.hpp>
#include <burstlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace burstlab {

/// Histogram density on geometric bins 10^(j/b) .. 10^((j+1)/b).
struct LogBinnedPdf {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;
    std::vector<double> density;   ///< count / (n_total * width)
    std::vector<std::uint64_t> count;
    std::size_t n_total = 0;       ///< samples the density is normalized by
    int bins_per_decade = 8;

    std::size_t size() const noexcept { return density.size(); }
    double center(std::size_t i) const noexcept { return std::sqrt(bin_lo[i] * bin_hi[i]); }
    /// Below 100 samples the density is too noisy to fit.
    bool sparse() const noexcept { return n_total < 100; }
};

/// Log-binned PDF of the positive samples; edges snap to the decade grid so that
/// runs are directly comparable. Non-positive samples count towards n_total only.
inline LogBinnedPdf log_binned_pdf(std::span<const double> samples, int bins_per_decade = 8) {
    detail::require(bins_per_decade >= 1, "log_binned_pdf: bins_per_decade must be >= 1");
    LogBinnedPdf pdf;
    pdf.bins_per_decade = bins_per_decade;
    pdf.n_total = samples.size();
    double lo = INFINITY, hi = 0.0;
    for (double v : samples)
        if (v > 0.0 && std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > 0.0)) return pdf;

    const double b = bins_per_decade;
    const auto j0 = static_cast<std::int64_t>(std::floor(std::log10(lo) * b));
    auto j1 = static_cast<std::int64_t>(std::floor(std::log10(hi) * b)) + 1;
    const auto edge = [&](std::int64_t j) { return std::pow(10.0, static_cast<double>(j) / b); };
    while (edge(j1) <= hi) ++j1;

    const auto nb = static_cast<std::size_t>(j1 - j0);
    pdf.count.assign(nb, 0);
    for (double v : samples) {
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        auto j = static_cast<std::int64_t>(std::floor(std::log10(v) * b));
        // log10 rounding can put a value one bin off near an edge.
        if (edge(j) > v) --j;
        if (edge(j + 1) <= v) ++j;
        j = std::clamp(j, j0, j1 - 1);
        ++pdf.count[static_cast<std::size_t>(j - j0)];
    }
    pdf.bin_lo.resize(nb);
    pdf.bin_hi.resize(nb);
    pdf.density.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        pdf.bin_lo[i] = edge(j0 + static_cast<std::int64_t>(i));
        pdf.bin_hi[i] = edge(j0 + static_cast<std::int64_t>(i) + 1);
        pdf.density[i] = static_cast<double>(pdf.count[i]) /
                         (static_cast<double>(pdf.n_total) * (pdf.bin_hi[i] - pdf.bin_lo[i]));
    }
    return pdf;
}

/// Log-binned PDF of the durations of one kind.
inline LogBinnedPdf duration_pdf(std::span<const DurationSample> d, DurationKind kind, int bins_per_decade = 8) {
    const auto values = durations_of(d, kind);
    if (values.empty()) throw InsufficientDataError("duration_pdf: no durations of the requested kind");
    return log_binned_pdf(values, bins_per_decade);
}

}  // namespace burstlab
