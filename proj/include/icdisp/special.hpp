#pragma once

// Scalar special functions used throughout the library.
//
// All rates are in nats per channel use and all dispersions in nats^2 per
// channel use; no bits anywhere.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace icdisp {

inline constexpr double kSqrt2Pi = 2.5066282746310005024;

namespace detail {

inline void require_finite_nonneg_snr(double snr) {
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw std::domain_error("snr must be finite and nonnegative");
}

} // namespace detail

/// Gaussian capacity C(s) = 0.5 log(1+s), nats per channel use.
inline double gaussian_capacity(double snr) {
    detail::require_finite_nonneg_snr(snr);
    return 0.5 * std::log1p(snr);
}

/// Gaussian dispersion V(s) = s(s+2) / (2 (s+1)^2), nats^2 per channel use.
/// Value lies in [0, 1/2); the 1/2 is attained only in the limit s -> inf.
inline double gaussian_dispersion(double snr) {
    detail::require_finite_nonneg_snr(snr);
    // factored form stays finite for arbitrarily large s
    const double a = snr / (snr + 1.0);
    const double b = (snr + 2.0) / (snr + 1.0);
    return 0.5 * a * b;
}

inline double std_normal_pdf(double t) {
    return std::exp(-0.5 * t * t) / kSqrt2Pi;
}

/// Standard normal CDF via the complementary error function.
/// Absolute error below 1e-14; +-inf map to 1/0, NaN is rejected.
inline double std_normal_cdf(double t) {
    if (std::isnan(t)) throw std::domain_error("std_normal_cdf: NaN argument");
    if (t == std::numeric_limits<double>::infinity()) return 1.0;
    if (t == -std::numeric_limits<double>::infinity()) return 0.0;
    return 0.5 * std::erfc(-t * 0.70710678118654752440);
}

namespace detail {

// Acklam's rational initial approximation to the normal quantile,
// |relative error| < 1.15e-9 over (0,1).
inline double normal_quantile_seed(double p) {
    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

/// Inverse standard normal CDF: the unique x with Phi(x) = p.
/// Rational seed refined by two Halley steps; |Phi(result) - p| < 1e-14
/// away from the extreme tails.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
    double x = detail::normal_quantile_seed(p);
    for (int i = 0; i < 2; ++i) {
        if (x * x > 1350.0) break; // exp(x^2/2) would overflow; seed is accurate here
        const double e = std_normal_cdf(x) - p;
        const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

/// log Gamma(z) for z > 0.
inline double log_gamma(double z) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("log_gamma: z must be finite and positive");
    int sign = 0;
    return ::lgamma_r(z, &sign);
}

/// Upper bound on the Binet integral remainder of log Gamma(z).
inline double binet_remainder_bound(double z) {
    if (!(z > 0.0)) throw std::domain_error("binet_remainder_bound: z must be positive");
    return 1.0 / (12.0 * z);
}

/// Stirling-with-remainder upper bound on log Gamma(z):
///   (z - 1/2) log z - z + (1/2) log(2 pi) + 1/(12 z)  >=  log Gamma(z).
/// Diagnostic companion to log_gamma.
inline double log_gamma_binet_upper(double z) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("log_gamma_binet_upper: z must be finite and positive");
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * M_PI) +
           binet_remainder_bound(z);
}

namespace detail {

// Power series for log I_v(z); all terms are positive so there is no
// cancellation. The running sum is renormalised to avoid overflow, which
// keeps the series usable for any z at the cost of term count ~ z/2.
inline double log_bessel_i_series(double v, double z) {
    const double q = 0.25 * z * z;
    double sum = 1.0;
    double term = 1.0;
    double log_scale = 0.0;
    constexpr double kBig = 1e280;
    const std::size_t max_terms = 2000000;
    for (std::size_t k = 0; k < max_terms; ++k) {
        term *= q / ((static_cast<double>(k) + 1.0) * (v + static_cast<double>(k) + 1.0));
        sum += term;
        if (sum > kBig) {
            sum /= kBig;
            term /= kBig;
            log_scale += std::log(kBig);
        }
        if (term < sum * 1e-19 && static_cast<double>(k) > 0.5 * z) break;
    }
    return v * std::log(0.5 * z) - log_gamma(v + 1.0) + std::log(sum) + log_scale;
}

// Olver's uniform asymptotic expansion of I_v(v x), terms u_0..u_4.
// Accurate to ~1e-9 absolute on the log for v >= 30.
inline double log_bessel_i_uniform(double v, double z) {
    const double x = z / v;
    const double s2 = 1.0 + x * x;
    const double sq = std::sqrt(s2);
    const double t = 1.0 / sq;
    const double eta = sq + std::log(x / (1.0 + sq));
    const double t2 = t * t;
    const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
    const double u2 = t2 * (81.0 + t2 * (-462.0 + t2 * 385.0)) / 1152.0;
    const double u3 =
        t * t2 * (30375.0 + t2 * (-369603.0 + t2 * (765765.0 - t2 * 425425.0))) / 414720.0;
    const double u4 = t2 * t2 *
                      (4465125.0 +
                       t2 * (-94121676.0 +
                             t2 * (349922430.0 + t2 * (-446185740.0 + t2 * 185910725.0)))) /
                      39813120.0;
    const double series = 1.0 + (u1 + (u2 + (u3 + u4 / v) / v) / v) / v;
    return v * eta - 0.5 * std::log(2.0 * M_PI * v) - 0.25 * std::log(s2) +
           std::log(series);
}

} // namespace detail

/// log I_v(z), modified Bessel function of the first kind, v >= 0, z > 0.
/// Power series for v <= 30, Olver's uniform asymptotic expansion above;
/// designed for orders up to ~n/2 with n <= 1e4 without overflow.
inline double log_bessel_i(double order, double z) {
    if (!(order >= 0.0) || !std::isfinite(order) || !(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("log_bessel_i: need order >= 0 and z > 0, both finite");
    if (order > 30.0) return detail::log_bessel_i_uniform(order, z);
    return detail::log_bessel_i_series(order, z);
}

/// Upper bound on log(z^{-k} I_k(z)):
///   sqrt(pi/8) (k^2+z^2)^{-1/4} (k + sqrt(k^2+z^2))^{-k} e^{sqrt(k^2+z^2)}.
inline double log_scaled_bessel_i_upper(double k, double z) {
    if (!(k >= 0.0) || !(z > 0.0))
        throw std::domain_error("log_scaled_bessel_i_upper: need k >= 0, z > 0");
    const double r = std::hypot(k, z);
    return 0.5 * std::log(M_PI / 8.0) - 0.5 * std::log(r) - k * std::log(k + r) + r;
}

} // namespace icdisp
