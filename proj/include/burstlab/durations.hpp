#pragma once

#include <burstlab/series.hpp>

#include <span>
#include <string_view>
#include <vector>

namespace burstlab {

enum class DurationKind { Burst, InterBurst };

inline std::string_view to_string(DurationKind k) noexcept { return k == DurationKind::Burst ? "burst" : "interburst"; }

/// A burst (time above the threshold) or inter-burst (time below) between two
/// consecutive threshold passages.
struct DurationSample {
    DurationKind kind = DurationKind::Burst;
    double t_start = 0.0;
    double t_end = 0.0;
    double duration = 0.0;
};

/// Splits a series into alternating bursts and inter-bursts.
///
/// A sample is "above" when it is strictly greater than the threshold. Passage times
/// are placed by linear interpolation between the two straddling samples; the
/// partial intervals before the first and after the last passage are dropped.
/// Passages that coincide exactly (a sample sitting on the threshold) cancel.
inline std::vector<DurationSample> extract_durations(const TimeSeries& s, double threshold) {
    std::vector<double> times;
    std::vector<bool> rising;
    const auto& v = s.values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const bool a = v[i] > threshold;
        const bool b = v[i + 1] > threshold;
        if (a == b) continue;
        const double frac = (threshold - v[i]) / (v[i + 1] - v[i]);
        const double t = s.t0 + (static_cast<double>(i) + frac) * s.dt;
        if (!times.empty() && t <= times.back()) {
            times.pop_back();
            rising.pop_back();
            continue;
        }
        times.push_back(t);
        rising.push_back(b);
    }

    std::vector<DurationSample> out;
    if (times.size() < 2) return out;
    out.reserve(times.size() - 1);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const DurationKind kind = rising[k] ? DurationKind::Burst : DurationKind::InterBurst;
        out.push_back({kind, times[k], times[k + 1], times[k + 1] - times[k]});
    }
    return out;
}

inline std::vector<double> durations_of(std::span<const DurationSample> d, DurationKind kind) {
    std::vector<double> out;
    for (const auto& s : d)
        if (s.kind == kind) out.push_back(s.duration);
    return out;
}

}  // namespace burstlab
