#pragma once

#include <burstlab/binning.hpp>
#include <burstlab/error.hpp>
#include <burstlab/psd.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace burstlab {

struct FitWindow {
    double lo = 0.0;
    double hi = INFINITY;
};

/// Least-squares line through log10 points; exponent is the negated slope.
struct PowerLawFit {
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;  ///< log10 amplitude at abscissa 1
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    std::size_t n_points = 0;
};

namespace detail {

inline PowerLawFit fit_log_points(std::span<const double> lx, std::span<const double> ly, FitWindow w) {
    const std::size_t n = lx.size();
    if (n < 4) throw InsufficientDataError("fit_powerlaw: fewer than 4 non-empty bins in window");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit_powerlaw: degenerate abscissae");
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - icpt - slope * lx[i];
        ssr += r * r;
    }
    PowerLawFit f;
    f.exponent = -slope;
    f.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    f.intercept = icpt;
    f.fit_lo = w.lo;
    f.fit_hi = w.hi;
    f.n_points = n;
    return f;
}

}  // namespace detail

/// Fits density ~ T^(-exponent) over bins whose geometric centre lies in the window.
inline PowerLawFit fit_powerlaw(const LogBinnedPdf& pdf, FitWindow w) {
    detail::require(w.lo < w.hi, "fit_powerlaw: window must satisfy lo < hi");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        const double c = pdf.center(i);
        if (pdf.count[i] == 0 || c < w.lo || c > w.hi) continue;
        lx.push_back(std::log10(c));
        ly.push_back(std::log10(pdf.density[i]));
    }
    return detail::fit_log_points(lx, ly, w);
}

/// Fits S(f) ~ f^(-beta). Periodogram ordinates are first averaged in geometric
/// frequency bins so every decade carries equal weight.
inline PowerLawFit fit_powerlaw(const PsdEstimate& psd, FitWindow w, int bins_per_decade = 8) {
    detail::require(w.lo < w.hi, "fit_powerlaw: window must satisfy lo < hi");
    detail::require(bins_per_decade >= 1, "fit_powerlaw: bins_per_decade must be >= 1");
    std::vector<double> lx, ly;
    const double b = bins_per_decade;
    std::size_t i = 0;
    while (i < psd.freqs.size()) {
        const double f = psd.freqs[i];
        if (f < w.lo || f > w.hi) {
            ++i;
            continue;
        }
        const double bin = std::floor(std::log10(f) * b);
        double sum_lf = 0.0, sum_p = 0.0;
        std::size_t m = 0;
        while (i < psd.freqs.size() && psd.freqs[i] <= w.hi && std::floor(std::log10(psd.freqs[i]) * b) == bin) {
            sum_lf += std::log10(psd.freqs[i]);
            sum_p += psd.power[i];
            ++m;
            ++i;
        }
        if (sum_p > 0.0) {
            lx.push_back(sum_lf / static_cast<double>(m));
            ly.push_back(std::log10(sum_p / static_cast<double>(m)));
        }
    }
    return detail::fit_log_points(lx, ly, w);
}

/// Duration at which the empirical survival fraction first drops to `fraction`.
inline double survival_duration(std::vector<double> durations, double fraction) {
    if (durations.empty()) throw InsufficientDataError("survival_duration: no durations");
    std::sort(durations.begin(), durations.end());
    const auto n = static_cast<double>(durations.size());
    const auto idx = static_cast<std::size_t>(std::clamp(std::ceil((1.0 - fraction) * n) - 1.0, 0.0, n - 1.0));
    return durations[idx];
}

/// Rule for the pre-cutoff fit window of a duration PDF.
struct DurationWindowRule {
    double grid_multiple = 10.0;     ///< lower edge in grid steps; shorter durations carry interpolation bias
    double cutoff_fraction = 0.1;    ///< upper edge as a fraction of a known cutoff time
    double survival_fraction = 0.01; ///< upper edge without theory: where survival drops to this share
};

/// Lower edge grid_multiple * grid_dt; upper edge cutoff_fraction * T_c when a
/// cutoff is known, else the empirical survival point.
inline FitWindow duration_fit_window(std::span<const double> durations, double grid_dt, std::optional<double> cutoff_time,
                                     const DurationWindowRule& rule = {}) {
    FitWindow w;
    w.lo = rule.grid_multiple * grid_dt;
    if (cutoff_time)
        w.hi = rule.cutoff_fraction * *cutoff_time;
    else
        w.hi = survival_duration(std::vector<double>(durations.begin(), durations.end()), rule.survival_fraction);
    return w;
}

}  // namespace burstlab
