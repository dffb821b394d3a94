#pragma once

#include <burstlab/bessel.hpp>
#include <burstlab/error.hpp>
#include <burstlab/model.hpp>

#include <cmath>

namespace burstlab {

/// Asymptotic burst-duration law of the reduced power-law SDE for a threshold h_y.
struct BurstAsymptotics {
    double nu = 0.0;            ///< Bessel order (lambda - 2 eta + 1) / (2 (eta - 1))
    double bessel_zero = 0.0;   ///< j_{nu,1}
    double cutoff_rate = 0.0;   ///< (eta-1)^2 h^(2(eta-1)) j^2 / 2
    double cutoff_time = 0.0;   ///< 1 / cutoff_rate
};

inline BurstAsymptotics burst_asymptotics(double h_y, const EffectiveParams& ep) {
    detail::require_domain(h_y > 0.0 && std::isfinite(h_y), "burst_asymptotics: threshold must be > 0");
    BurstAsymptotics a;
    a.nu = bessel_order(ep);
    a.bessel_zero = bessel_first_zero(a.nu);
    a.cutoff_time = burst_cutoff_time(h_y, ep, a.bessel_zero);
    a.cutoff_rate = 1.0 / a.cutoff_time;
    return a;
}

/// Unnormalized burst-duration shape: T^(-3/2) up to T_c, then (C/T) exp(-T/T_c) with
/// C chosen for continuity at T_c. The junction is plotting glue between the two
/// asymptotic regimes, not a derived density.
inline double theoretical_burst_pdf(double T, double h_y, const EffectiveParams& ep) {
    detail::require_domain(T > 0.0 && std::isfinite(T), "theoretical_burst_pdf: T must be > 0");
    const BurstAsymptotics a = burst_asymptotics(h_y, ep);
    const double tc = a.cutoff_time;
    if (T <= tc) return std::pow(T, -1.5);
    const double c = std::exp(1.0) / std::sqrt(tc);
    return c / T * std::exp(-T / tc);
}

/// Hurst parameter from a PSD exponent, H = (beta - 1) / 2. Meaningful for 1 <= beta <= 3.
inline double hurst_from_beta(double beta) { return (beta - 1.0) / 2.0; }

inline bool hurst_beta_in_range(double beta) { return beta >= 1.0 && beta <= 3.0; }

}  // namespace burstlab
