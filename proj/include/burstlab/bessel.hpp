#pragma once

#include <burstlab/error.hpp>

#include <cmath>

namespace burstlab {

namespace detail {

/// G(x) = J_nu(x) / (x/2)^nu as its power series in (x/2)^2, summed in long double.
/// G is entire in x, has the same positive zeros as J_nu and G(0) = 1/Gamma(nu+1) > 0.
inline long double bessel_scaled_series(double nu, double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L / std::tgamma(static_cast<long double>(nu) + 1.0L);
    long double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= -q / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
        sum += term;
        if (k > x && std::fabs(term) <= 1e-22L * std::fabs(sum)) break;
    }
    return sum;
}

}  // namespace detail

/// Bessel function of the first kind for nu > -1 and 0 <= x <= 40 by its power
/// series. The range covers the first zeros of every order the model produces.
inline double bessel_j(double nu, double x) {
    detail::require_domain(nu > -1.0, "bessel_j: order must be > -1");
    detail::require_domain(x >= 0.0 && x <= 40.0, "bessel_j: argument must lie in [0, 40]");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return static_cast<double>(detail::bessel_scaled_series(nu, x) * std::pow(static_cast<long double>(x) / 2.0L, nu));
}

/// First positive zero j_{nu,1} of J_nu: scan the scaled series for the first sign
/// change, then bisect to full double precision.
inline double bessel_first_zero(double nu) {
    detail::require_domain(nu > -1.0, "bessel_first_zero: order must be > -1");
    detail::require_domain(nu <= 20.0, "bessel_first_zero: order above 20 is not supported");
    constexpr double step = 0.05;
    double lo = 0.0;
    double hi = step;
    while (detail::bessel_scaled_series(nu, hi) > 0.0L) {
        lo = hi;
        hi += step;
    }
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::bessel_scaled_series(nu, mid) > 0.0L)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace burstlab
