#pragma once

#include <burstlab/error.hpp>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace burstlab {

/// Free parameters of the imitative (noisy voter / Kirman) agent model with
/// state-dependent interaction time scale.
struct ModelParams {
    double eps1 = 0.0;          ///< idiosyncratic switching rate towards state 1
    double eps2 = 0.0;          ///< idiosyncratic switching rate towards state 2
    double alpha = 2.0;         ///< nonlinearity of the interaction time scale
    std::int64_t n_agents = 1000;
    double h_scale = 1.0;       ///< base time-scale factor (1/time)

    void validate() const {
        using detail::require;
        require(std::isfinite(eps1) && eps1 >= 0.0, "eps1 must be >= 0");
        require(std::isfinite(eps2) && eps2 >= 0.0, "eps2 must be >= 0");
        require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
        require(n_agents >= 2, "n_agents must be >= 2");
        require(std::isfinite(h_scale) && h_scale > 0.0, "h_scale must be > 0");
    }

    /// Beta(eps1+alpha, eps2+alpha) is normalizable only when both shapes are positive.
    bool has_stationary_law() const noexcept { return eps1 + alpha > 0.0 && eps2 + alpha > 0.0; }
};

/// Exponents of the reduced power-law SDE dy = (eta - lambda/2) y^(2 eta - 1) dt + y^eta dW.
struct EffectiveParams {
    double eta = 0.0;
    double lambda = 0.0;
    double beta = 0.0;   ///< PSD exponent, S(f) ~ 1/f^beta
    double hurst = 0.0;  ///< (beta - 1) / 2
};

struct AgentRates {
    double mu1 = 0.0;
    double mu2 = 0.0;
};

struct SystemRates {
    double up = 0.0;    ///< P(n -> n+1)
    double down = 0.0;  ///< P(n -> n-1)
    double total() const noexcept { return up + down; }
};

namespace detail {

/// t^a with an exact multiplication path for small integer exponents (alpha = 2 in
/// every figure), falling back to std::pow otherwise.
class PowerOf {
public:
    explicit PowerOf(double a) noexcept : a_(a) {
        const double r = std::round(a);
        if (r == a && r >= 0.0 && r <= 16.0) k_ = static_cast<int>(r);
    }
    double operator()(double t) const noexcept {
        if (k_ < 0) return std::pow(t, a_);
        double out = 1.0, base = t;
        for (int k = k_; k > 0; k >>= 1) {
            if (k & 1) out *= base;
            base *= base;
        }
        return out;
    }
    double exponent() const noexcept { return a_; }

private:
    double a_;
    int k_ = -1;
};

}  // namespace detail

/// Per-agent transition rates mu1(x), mu2(x) on the open interval (0, 1).
inline AgentRates per_agent_rates(double x, const ModelParams& p) {
    detail::require_domain(x > 0.0 && x < 1.0, "per_agent_rates: x must lie in (0, 1)");
    const double n = static_cast<double>(p.n_agents);
    const double scale = p.h_scale * std::pow(x * (1.0 - x), -p.alpha);
    return {scale * (p.eps1 + n * x), scale * (p.eps2 + n * (1.0 - x))};
}

/// System-wide one-step rates at n agents in state 1.
///
/// Interior states use the per-agent rates at x = n/N. At n = 0 and n = N the outward
/// transition is exactly zero and the inward one is the x -> boundary limit of the
/// combined product; for alpha > 0 that limit is usually +inf, which is why the jump
/// engine confines alpha > 0 dynamics to [1, N-1].
inline SystemRates system_rates(std::int64_t n, const ModelParams& p) {
    const std::int64_t total = p.n_agents;
    detail::require_domain(n >= 0 && n <= total, "system_rates: n must lie in [0, N]");
    const double nn = static_cast<double>(total);
    if (n > 0 && n < total) {
        const double x = static_cast<double>(n) / nn;
        const auto mu = per_agent_rates(x, p);
        return {static_cast<double>(total - n) * mu.mu1, static_cast<double>(n) * mu.mu2};
    }
    // Limit of N * h * (eps + N s) * s^(-alpha) as s -> 0+, s being the distance to the wall.
    const auto inward = [&](double eps) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (p.alpha == 0.0) return nn * p.h_scale * eps;
        if (eps > 0.0) return inf;
        if (p.alpha < 1.0) return 0.0;
        if (p.alpha == 1.0) return nn * p.h_scale * nn;
        return inf;
    };
    if (n == 0) return {inward(p.eps1), 0.0};
    return {0.0, inward(p.eps2)};
}

/// Stationary density of x: Beta(eps1 + alpha, eps2 + alpha).
inline double stationary_pdf_x(double x, const ModelParams& p) {
    detail::require_domain(x > 0.0 && x < 1.0, "stationary_pdf_x: x must lie in (0, 1)");
    const double a = p.eps1 + p.alpha;
    const double b = p.eps2 + p.alpha;
    detail::require_domain(a > 0.0 && b > 0.0, "stationary_pdf_x: eps1+alpha and eps2+alpha must be > 0");
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

/// Stationary CDF of x (regularized incomplete beta), used for KS checks.
inline double stationary_cdf_x(double x, const ModelParams& p) {
    const double a = p.eps1 + p.alpha;
    const double b = p.eps2 + p.alpha;
    detail::require_domain(a > 0.0 && b > 0.0, "stationary_cdf_x: eps1+alpha and eps2+alpha must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

inline double to_y(double x) {
    detail::require_domain(x > 0.0 && x < 1.0, "to_y: x must lie in (0, 1)");
    return x / (1.0 - x);
}

inline double from_y(double y) {
    detail::require_domain(y > 0.0 && std::isfinite(y), "from_y: y must be positive and finite");
    return y / (1.0 + y);
}

inline EffectiveParams effective_params(const ModelParams& p) {
    detail::require_domain(p.alpha >= 0.0, "effective_params: alpha must be >= 0");
    EffectiveParams e;
    e.eta = (3.0 + p.alpha) / 2.0;
    e.lambda = p.eps2 + p.alpha + 1.0;
    e.beta = 1.0 + (e.lambda - 3.0) / (2.0 * e.eta - 2.0);
    e.hurst = (e.beta - 1.0) / 2.0;
    return e;
}

/// Order of the Bessel function whose first zero sets the burst cutoff rate.
inline double bessel_order(const EffectiveParams& ep) {
    detail::require_domain(ep.eta > 1.0, "bessel_order: eta must be > 1");
    return (ep.lambda - 2.0 * ep.eta + 1.0) / (2.0 * (ep.eta - 1.0));
}

/// Duration separating the T^(-3/2) burst regime from the exponential cutoff,
/// 2 / ((eta-1)^2 h^(2(eta-1)) j^2), with the threshold h expressed in y units.
inline double burst_cutoff_time(double h_y, const EffectiveParams& ep, double nu_zero) {
    detail::require_domain(h_y > 0.0 && std::isfinite(h_y), "burst_cutoff_time: threshold must be > 0");
    detail::require_domain(nu_zero > 0.0, "burst_cutoff_time: Bessel zero must be > 0");
    detail::require_domain(ep.eta > 1.0, "burst_cutoff_time: eta must be > 1");
    const double e1 = ep.eta - 1.0;
    return 2.0 / (e1 * e1 * std::pow(h_y, 2.0 * e1) * nu_zero * nu_zero);
}

}  // namespace burstlab
