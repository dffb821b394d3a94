#pragma once

#include <burstlab/error.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace burstlab {

/// Uniformly sampled scalar trajectory: values[i] is the state at t0 + i * dt.
struct TimeSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    double time_at(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    double duration() const noexcept { return values.empty() ? 0.0 : static_cast<double>(values.size() - 1) * dt; }
    std::span<const double> view() const noexcept { return values; }

    void validate() const {
        detail::require(std::isfinite(t0), "TimeSeries: t0 must be finite");
        detail::require(std::isfinite(dt) && dt > 0.0, "TimeSeries: dt must be > 0");
        detail::require(!values.empty(), "TimeSeries: no samples");
        for (double v : values)
            detail::require(std::isfinite(v), "TimeSeries: non-finite sample");
    }
};

/// Applies f to every sample, keeping the time grid.
template <class F>
TimeSeries map_values(const TimeSeries& s, F&& f) {
    TimeSeries out{s.t0, s.dt, {}};
    out.values.reserve(s.size());
    for (double v : s.values) out.values.push_back(f(v));
    return out;
}

}  // namespace burstlab
