#pragma once

// Independent test-side oracles. These deliberately avoid the library's
// evaluation paths: the CDF oracle integrates the density, the Bessel
// oracle sums the series with direct tgamma calls, the log-gamma oracle
// uses argument shifting plus a Stirling tail.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <icdisp/channel.hpp>

namespace oracles {

// composite Simpson integration of the standard normal density over [a,b]
inline double simpson_normal_mass(double a, double b, int intervals = 200000) {
    auto f = [](double u) { return std::exp(-0.5 * u * u) / 2.5066282746310005024; };
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double simpson_normal_cdf(double t) { return simpson_normal_mass(-14.0, t); }

// bisection inverse of a monotone function on [lo,hi]
template <typename F>
inline double bisect(F&& f, double target, double lo, double hi, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// naive power series for log I_v(z), small arguments only
inline double naive_log_bessel_i(double v, double z, int terms = 60) {
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) {
        sum += std::pow(0.5 * z, v + 2.0 * k) /
               (std::tgamma(k + 1.0) * std::tgamma(v + k + 1.0));
    }
    return std::log(sum);
}

// log Gamma via recurrence to a large argument plus a Stirling series tail
inline double stirling_log_gamma(double z) {
    double shift = 0.0;
    while (z < 20.0) {
        shift -= std::log(z);
        z += 1.0;
    }
    const double z2 = z * z;
    const double series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) +
                          1.0 / (1260.0 * z2 * z2 * z) - 1.0 / (1680.0 * z2 * z2 * z2 * z);
    return shift + (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * M_PI) + series;
}

// closed-form standard bivariate orthant probability Pr[Z1<=0, Z2<=0]
inline double bivariate_orthant(double rho) {
    return 0.25 + std::asin(rho) / (2.0 * M_PI);
}

// Kolmogorov-Smirnov distance between a sample and the standard normal CDF
inline double ks_distance_normal(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = 0.5 * std::erfc(-sample[i] * 0.70710678118654752440);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

// random channels in the strictly very strong regime, built so both
// definition inequalities hold with a positive margin
inline icdisp::ChannelParams random_svs_channel(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::uniform_real_distribution<double> margin(1.05, 2.5);
    icdisp::ChannelParams ch;
    ch.h11 = u(gen);
    ch.h22 = u(gen);
    ch.p1 = u(gen);
    ch.p2 = u(gen);
    ch.h21 = margin(gen) * ch.h22 * std::sqrt(1.0 + ch.h11 * ch.h11 * ch.p1);
    ch.h12 = margin(gen) * ch.h11 * std::sqrt(1.0 + ch.h22 * ch.h22 * ch.p2);
    return ch;
}

} // namespace oracles
