#pragma once

#include <burstlab/error.hpp>
#include <burstlab/model.hpp>
#include <burstlab/random.hpp>
#include <burstlab/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace burstlab {

/// Integration settings shared by the x and y equations.
struct SdeConfig {
    double kappa = 0.03;   ///< relative step accuracy
    double y_min = 1e-5;   ///< lower reflective bound in y
    double y_max = 1e5;    ///< upper reflective bound in y
    double t_total = 1e3;
    double grid_dt = 1e-2;
    std::uint64_t seed = 1;

    /// Throws ConfigError on violated constraints; returns soft warnings.
    std::vector<std::string> validate() const {
        using detail::require;
        require(std::isfinite(kappa) && kappa > 0.0 && kappa < 1.0, "kappa must lie in (0, 1)");
        require(std::isfinite(y_min) && y_min > 0.0, "y_min must be > 0");
        require(std::isfinite(y_max) && y_max > y_min, "y_max must exceed y_min");
        require(std::isfinite(grid_dt) && grid_dt > 0.0, "grid_dt must be > 0");
        require(std::isfinite(t_total) && t_total >= 100.0 * grid_dt, "t_total must be >= 100 * grid_dt");
        std::vector<std::string> warnings;
        if (kappa > 0.1) warnings.push_back("kappa > 0.1: Euler-Maruyama steps are coarse");
        return warnings;
    }

    double x_min() const { return from_y(y_min); }
    double x_max() const { return from_y(y_max); }
    std::size_t n_samples() const { return static_cast<std::size_t>(std::floor(t_total / grid_dt)) + 1; }
};

struct DriftDiffusion {
    double a = 0.0;  ///< drift rate
    double b = 0.0;  ///< diffusion amplitude
};

namespace detail {

/// Ito coefficients of x with the generalized rates. The imitation terms cancel
/// analytically in the drift, so the cancelled form is evaluated directly.
class XCoefficients {
public:
    explicit XCoefficients(const ModelParams& p)
        : h_(p.h_scale), e1_(p.eps1), e2_(p.eps2), inv_n_(1.0 / static_cast<double>(p.n_agents)),
          pow_alpha_(p.alpha) {}

    DriftDiffusion operator()(double x) const noexcept {
        const double q = x * (1.0 - x);
        const double g = h_ / pow_alpha_(q);
        const double a = g * (e1_ * (1.0 - x) - e2_ * x);
        const double b2 = g * ((e1_ * (1.0 - x) + e2_ * x) * inv_n_ + 2.0 * q);
        return {a, std::sqrt(b2)};
    }

private:
    double h_, e1_, e2_, inv_n_;
    PowerOf pow_alpha_;
};

/// Ito coefficients of y = x/(1-x) in the large-N limit.
class YCoefficients {
public:
    explicit YCoefficients(const ModelParams& p)
        : h_(p.h_scale), e1_(p.eps1), e2_(p.eps2), pow_alpha_(p.alpha) {}

    DriftDiffusion operator()(double y) const noexcept {
        const double ya = pow_alpha_(y);          // y^alpha
        const double y1 = 1.0 + y;
        const double pa = pow_alpha_(y1);         // (1+y)^alpha
        const double a = h_ * (e1_ / ya + (2.0 - e2_) * y / ya) * pa * pa * y1;
        const double b = std::sqrt(2.0 * h_ * y / ya) * pa * y1;
        return {a, b};
    }

private:
    double h_, e1_, e2_;
    PowerOf pow_alpha_;
};

/// Mirror reflection into [lo, hi], repeated until inside (folding with period 2L).
inline double reflect(double v, double lo, double hi) noexcept {
    if (v >= lo && v <= hi) return v;
    const double len = hi - lo;
    double u = std::fmod(v - lo, 2.0 * len);
    if (u < 0.0) u += 2.0 * len;
    if (u > len) u = 2.0 * len - u;
    return lo + u;
}

}  // namespace detail

inline DriftDiffusion drift_diffusion_x(double x, const ModelParams& p) {
    detail::require_domain(x > 0.0 && x < 1.0, "drift_diffusion_x: x must lie in (0, 1)");
    return detail::XCoefficients(p)(x);
}

inline DriftDiffusion drift_diffusion_y(double y, const ModelParams& p) {
    detail::require_domain(y > 0.0 && std::isfinite(y), "drift_diffusion_y: y must be > 0");
    return detail::YCoefficients(p)(y);
}

/// Variable step bounding both relative drift displacement (|a| dt <= kappa s)
/// and relative diffusion displacement (b^2 dt <= kappa^2 s^2), where s is the
/// state's scale (y itself, or the distance of x to the nearer wall).
inline double adaptive_dt(double scale, double a, double b, const SdeConfig& c) {
    detail::require_domain(b > 0.0 && scale > 0.0, "adaptive_dt: diffusion and scale must be > 0");
    const double ks = c.kappa * scale;
    double dt = std::min(ks * ks / (b * b), c.grid_dt);
    if (a != 0.0) dt = std::min(dt, ks / std::abs(a));
    return dt;
}

namespace detail {

/// Euler-Maruyama with adaptive steps. Steps are truncated so that every grid
/// instant is hit exactly, which makes sample-and-hold at the grid exact.
template <class Coefficients, class Scale>
TimeSeries integrate_sde(double state, double lo, double hi, const Coefficients& coeff, const Scale& scale,
                         const SdeConfig& c) {
    CounterRng rng(c.seed, stream::wiener);
    const std::size_t n = c.n_samples();
    const auto burn_intervals = static_cast<std::size_t>(std::ceil(0.01 * c.t_total / c.grid_dt));
    const double eps_left = 1e-12 * c.grid_dt;

    TimeSeries out{0.0, c.grid_dt, {}};
    out.values.reserve(n);

    const auto advance_interval = [&]() {
        double left = c.grid_dt;
        while (left > eps_left) {
            const auto [a, b] = coeff(state);
            if (!std::isfinite(a) || !std::isfinite(b))
                throw NumericError("SDE coefficients became non-finite at state " + std::to_string(state));
            const double dt = std::min(adaptive_dt(scale(state), a, b, c), left);
            const double next = state + a * dt + b * std::sqrt(dt) * rng.normal();
            if (!std::isfinite(next)) throw NumericError("SDE step produced a non-finite state");
            state = reflect(next, lo, hi);
            left -= dt;
        }
    };

    for (std::size_t k = 0; k < burn_intervals; ++k) advance_interval();
    out.values.push_back(state);
    for (std::size_t k = 1; k < n; ++k) {
        advance_interval();
        out.values.push_back(state);
    }
    return out;
}

/// Initial fraction drawn from the stationary Beta law (midpoint if not normalizable).
inline double initial_fraction(const ModelParams& p, std::uint64_t seed, double lo, double hi) {
    CounterRng rng(seed, stream::initial_state);
    const double x = p.has_stationary_law() ? rng.beta(p.eps1 + p.alpha, p.eps2 + p.alpha) : 0.5;
    return std::clamp(x, lo, hi);
}

}  // namespace detail

/// Trajectory of x(t) on the uniform grid [0, t_total], reflected into (x_min, x_max).
inline TimeSeries simulate_x(const ModelParams& p, const SdeConfig& c) {
    p.validate();
    c.validate();
    const double lo = c.x_min(), hi = c.x_max();
    const double x0 = detail::initial_fraction(p, c.seed, lo, hi);
    const auto scale = [](double x) { return std::min(x, 1.0 - x); };
    return detail::integrate_sde(x0, lo, hi, detail::XCoefficients(p), scale, c);
}

/// Trajectory of y(t) on the uniform grid [0, t_total], reflected into [y_min, y_max].
inline TimeSeries simulate_y(const ModelParams& p, const SdeConfig& c) {
    p.validate();
    c.validate();
    const double x0 = detail::initial_fraction(p, c.seed, c.x_min(), c.x_max());
    const double y0 = std::clamp(to_y(x0), c.y_min, c.y_max);
    const auto scale = [](double y) { return y; };
    return detail::integrate_sde(y0, c.y_min, c.y_max, detail::YCoefficients(p), scale, c);
}

}  // namespace burstlab
