#pragma once

// Numerical verification of the output-density ratio machinery: the phi and
// rho limit functions, their finite-n versions, the exact D11 ratio against
// its exponential bound, and a numeric estimate of the constant K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "densities.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace icdisp {

namespace detail {

inline double c11_const() {
    return std::log(0.5) + 0.5 * std::log(M_PI / 8.0) + 0.5 * std::log(2.0 * M_PI);
}

inline double c12_const(const ChannelParams& ch) {
    return std::log(ch.p2 / std::sqrt(M_PI * ch.p1) * ch.h21 / ch.h11) +
           0.5 * std::log(2.0 * M_PI);
}

// vanishing slack sequence: Binet remainder bound at z = n/2
inline double cn_slack(int n) { return binet_remainder_bound(0.5 * static_cast<double>(n)); }

} // namespace detail

/// Limiting exponent of the receiver-1 conditional-output ratio bound:
///   phi(z) = log(2(1+s)e^{-(1+s)}) - s z/(1+s) + sqrt(1+4sz) - log(1+sqrt(1+4sz)),
/// s = h11^2 p1. Nonpositive with its unique zero at z = 1+s.
inline double phi_limit(const ChannelParams& ch, double z) {
    ch.validate();
    if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("phi_limit: z must be positive");
    const double s = ch.snr1();
    const double r = std::sqrt(1.0 + 4.0 * s * z);
    return std::log(2.0 * (1.0 + s)) - (1.0 + s) - s * z / (s + 1.0) + r - std::log1p(r);
}

/// Finite-n exponent with xi = (n/2-1)/(n/2); converges to phi_limit.
inline double phi_finite_n(const ChannelParams& ch, int n, double z) {
    ch.validate();
    if (n < 4) throw std::domain_error("phi_finite_n: n must be >= 4");
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("phi_finite_n: z must be positive");
    const double s = ch.snr1();
    const double xi = (0.5 * n - 1.0) / (0.5 * n);
    const double r = std::sqrt(xi * xi + 4.0 * s * z);
    return std::log(2.0 * (1.0 + s)) - (1.0 + s) - s * z / (s + 1.0) + r -
           xi * std::log(xi + r) - 0.5 * (1.0 - xi) * std::log(r);
}

/// Support band of ||b||^2/n for the composite input b = h11 x1 + h21 x2
/// with both codewords on their shells.
inline std::pair<double, double> rho_band(const ChannelParams& ch) {
    ch.validate();
    const double u = ch.h11 * std::sqrt(ch.p1);
    const double v = ch.h21 * std::sqrt(ch.p2);
    const double d = u - v;
    return {d * d, (u + v) * (u + v)};
}

/// Limiting exponent of the composite-input ratio bound, defined on the
/// open band rho_band(ch); nonpositive with its zero at h11^2 p1 + h21^2 p2.
inline double rho_limit(const ChannelParams& ch, double z) {
    const auto [lo, hi] = rho_band(ch);
    if (!(z > lo && z < hi)) throw std::domain_error("rho_limit: z outside the support band");
    const double A = ch.snr1();
    const double B = ch.h21 * ch.h21 * ch.p2;
    const double g = z + A - B;
    return std::log((A + B) / B) - 1.0 + z / (A + B) + std::log1p(-g * g / (4.0 * A * z));
}

/// Finite-n exponent; converges to rho_limit on the band.
inline double rho_finite_n(const ChannelParams& ch, int n, double z) {
    const auto [lo, hi] = rho_band(ch);
    if (n < 4) throw std::domain_error("rho_finite_n: n must be >= 4");
    if (!(z > lo && z < hi)) throw std::domain_error("rho_finite_n: z outside the support band");
    const double A = ch.snr1();
    const double B = ch.h21 * ch.h21 * ch.p2;
    const double g = z + A - B;
    const double dn = static_cast<double>(n);
    return -std::log(z) / dn + std::log((A + B) / B) - 1.0 + z / (A + B) +
           (dn - 3.0) / dn * std::log1p(-g * g / (4.0 * A * z));
}

/// Grid scan summary of a bound function: sampled values, the refined
/// maximum, and the count of points exceeding `tol`.
struct GridScan {
    std::string name;
    std::vector<double> z;
    std::vector<double> value;
    double max_value = 0.0;
    double argmax = 0.0;
    int violations = 0;
};

namespace detail {

// hybrid grid: half linear over [lo,hi], quarter log-dense near each end
inline std::vector<double> hybrid_grid(double lo, double hi, int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    const int n_lin = points / 2;
    const int n_log = (points - n_lin) / 2;
    const double width = hi - lo;
    for (int i = 0; i < n_lin; ++i)
        g.push_back(lo + width * static_cast<double>(i) / static_cast<double>(n_lin - 1));
    for (int i = 0; i < n_log; ++i) {
        const double f = std::pow(10.0, -9.0 + 9.0 * static_cast<double>(i) /
                                                   static_cast<double>(n_log - 1));
        g.push_back(lo + width * f * 0.5);
        g.push_back(hi - width * f * 0.5);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

template <typename F>
inline GridScan scan(std::string name, F&& f, const std::vector<double>& grid, double tol) {
    GridScan out;
    out.name = std::move(name);
    out.z = grid;
    out.value.reserve(grid.size());
    std::size_t imax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        out.value.push_back(v);
        if (v > tol) ++out.violations;
        if (v > out.value[imax]) imax = i;
    }
    out.max_value = out.value[imax];
    out.argmax = grid[imax];
    // parabolic refinement of the maximizer location
    if (imax > 0 && imax + 1 < grid.size()) {
        const double x0 = grid[imax - 1], x1 = grid[imax], x2 = grid[imax + 1];
        const double y0 = out.value[imax - 1], y1 = out.value[imax], y2 = out.value[imax + 1];
        const double d1 = (y1 - y0) / (x1 - x0);
        const double d2 = (y2 - y1) / (x2 - x1);
        const double curv = (d2 - d1) / (0.5 * (x2 - x0));
        if (curv < 0.0) {
            const double xs = 0.5 * (x0 + x1) - d1 / curv;
            if (xs > x0 && xs < x2) out.argmax = xs;
        }
    }
    return out;
}

} // namespace detail

/// Scans phi_limit over [z_lo, z_hi]; violations counted above 1e-10.
inline GridScan scan_phi_limit(const ChannelParams& ch, int points = 10000,
                               double z_lo = 0.01, double z_hi = 20.0) {
    if (points < 16) throw std::invalid_argument("scan_phi_limit: too few grid points");
    const auto grid = detail::hybrid_grid(z_lo, z_hi, points);
    return detail::scan("phi_limit", [&](double z) { return phi_limit(ch, z); }, grid, 1e-10);
}

/// Scans rho_limit over the open support band with endpoint insets of 1e-6
/// of the band width; violations counted above 1e-10.
inline GridScan scan_rho_limit(const ChannelParams& ch, int points = 10000) {
    if (points < 16) throw std::invalid_argument("scan_rho_limit: too few grid points");
    const auto [lo, hi] = rho_band(ch);
    const double inset = 1e-6 * (hi - lo);
    const auto grid = detail::hybrid_grid(lo + inset, hi - inset, points);
    return detail::scan("rho_limit", [&](double z) { return rho_limit(ch, z); }, grid, 1e-10);
}

/// Exact log of the receiver-1 conditional output-density ratio at squared
/// residual distance w2 = ||y1 - h21 x2||^2, for even blocklength n.
inline double log_d11(const ChannelParams& ch, int n, double w2) {
    ch.validate();
    if (n < 10 || n % 2 != 0)
        throw std::domain_error("log_d11: n must be even and >= 10 (odd n changes the Bessel order)");
    if (!(w2 > 0.0) || !std::isfinite(w2)) throw std::domain_error("log_d11: w2 must be positive");
    const double s = ch.snr1();
    const double hn = 0.5 * static_cast<double>(n);
    const double zeta = std::sqrt(static_cast<double>(n) * s * w2);
    return std::log(0.5) + log_gamma(hn) + hn * std::log(2.0 * std::exp(-s) * (1.0 + s)) -
           s * w2 / (2.0 * (1.0 + s)) + log_bessel_i(hn - 1.0, zeta) -
           (hn - 1.0) * std::log(zeta);
}

/// The exponential upper bound c11 + c_n + (n/2) phi_{xi,n}(w2/n) on log_d11.
inline double log_d11_bound(const ChannelParams& ch, int n, double w2) {
    return detail::c11_const() + detail::cn_slack(n) +
           0.5 * static_cast<double>(n) * phi_finite_n(ch, n, w2 / static_cast<double>(n));
}

/// Result of sampling the exact ratio against its bound, plus the
/// importance-sampling normalization check (mean of D11 under Q -> 1).
struct RatioCheck {
    int n = 0;
    std::uint64_t samples = 0;
    int violations = 0;      // samples with log_d11 > bound
    double min_margin = 0.0; // min over samples of bound - log_d11
    double max_log_d11 = 0.0;
    double is_mean = 0.0; // importance-sampling mean of D11 under Q
    double is_se = 0.0;
};

/// Draws w2 from the true channel law (direct sample of h11 x1 + z1) for
/// the bound comparison and from Q for the normalization check.
inline RatioCheck finite_n_ratio_check(const ChannelParams& ch, int n, std::uint64_t samples,
                                       std::uint64_t seed, int threads = 1) {
    ch.validate();
    if (n < 10 || n % 2 != 0)
        throw std::domain_error("finite_n_ratio_check: n must be even and >= 10");
    if (samples < 100) throw std::domain_error("finite_n_ratio_check: needs >= 100 samples");

    struct Accum {
        int violations = 0;
        double min_margin = 1e300;
        double max_log = -1e300;
        double is_sum = 0.0, is_sum2 = 0.0;
        std::uint64_t count = 0;
    };
    const std::size_t nchunks =
        static_cast<std::size_t>((samples + kTrialChunk - 1) / kTrialChunk);
    std::vector<Accum> parts(nchunks);
    const double a11 = 1.0 + ch.snr1();

    run_chunked(samples, threads, [&](std::size_t c, std::uint64_t first, std::uint64_t last) {
        Accum acc;
        std::vector<double> t(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n)),
            z(static_cast<std::size_t>(n));
        for (std::uint64_t i = first; i < last; ++i) {
            detail::draw_shell(t, x, n, ch.p1, seed, i, detail::kStreamT1);
            CounterRng rz(seed, i, detail::kStreamZ1);
            rz.fill_gaussian(z.data(), z.size());
            double w2 = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto ik = static_cast<std::size_t>(k);
                const double yk = ch.h11 * x[ik] + z[ik];
                w2 += yk * yk;
            }
            const double lhs = log_d11(ch, n, w2);
            const double margin = log_d11_bound(ch, n, w2) - lhs;
            if (margin < 0.0) ++acc.violations;
            acc.min_margin = std::min(acc.min_margin, margin);
            acc.max_log = std::max(acc.max_log, lhs);

            // Q-draw: w2 ~ a11 * chi^2_n
            CounterRng rq(seed, i, detail::kStreamAux);
            double w2q = 0.0;
            for (int k = 0; k < n; ++k) {
                const double g = rq.next_gaussian();
                w2q += a11 * g * g;
            }
            const double d = std::exp(log_d11(ch, n, w2q));
            acc.is_sum += d;
            acc.is_sum2 += d * d;
            ++acc.count;
        }
        parts[c] = acc;
    });

    RatioCheck out;
    out.n = n;
    out.samples = samples;
    out.min_margin = 1e300;
    out.max_log_d11 = -1e300;
    double is_sum = 0.0, is_sum2 = 0.0;
    std::uint64_t count = 0;
    for (const auto& p : parts) {
        out.violations += p.violations;
        out.min_margin = std::min(out.min_margin, p.min_margin);
        out.max_log_d11 = std::max(out.max_log_d11, p.max_log);
        is_sum += p.is_sum;
        is_sum2 += p.is_sum2;
        count += p.count;
    }
    const double tN = static_cast<double>(count);
    out.is_mean = is_sum / tN;
    const double var = std::max(is_sum2 / tN - out.is_mean * out.is_mean, 0.0);
    out.is_se = std::sqrt(var / tN);
    return out;
}

/// Numeric upper estimate of K = K11 + K12 + K21 + K22, taking each
/// exponential bound at its grid supremum. Verified for n >= 10.
struct KEstimate {
    double k11 = 0.0, k12 = 0.0, k21 = 0.0, k22 = 0.0;
    double total() const { return k11 + k12 + k21 + k22; }
};

inline KEstimate k_estimate(const ChannelParams& ch, int n) {
    ch.validate();
    if (n < 10) throw std::domain_error("k_estimate: n must be >= 10");
    const ChannelParams sw = swap_users(ch);
    const double cn = detail::cn_slack(n);

    auto sup_phi = [n](const ChannelParams& c) {
        const double zhi = std::max(20.0, 6.0 * (1.0 + c.snr1()));
        const auto grid = detail::hybrid_grid(1e-4, zhi, 4000);
        double m = -1e300;
        for (double z : grid) m = std::max(m, phi_finite_n(c, n, z));
        return m;
    };
    auto sup_rho = [n](const ChannelParams& c) {
        const auto [lo, hi] = rho_band(c);
        const double inset = 1e-9 * (hi - lo);
        const auto grid = detail::hybrid_grid(lo + inset, hi - inset, 4000);
        double m = -1e300;
        for (double z : grid) m = std::max(m, rho_finite_n(c, n, z));
        return m;
    };

    KEstimate k;
    const double hn = 0.5 * static_cast<double>(n);
    k.k11 = std::exp(detail::c11_const() + cn + hn * sup_phi(ch));
    k.k21 = std::exp(detail::c11_const() + cn + hn * sup_phi(sw));
    k.k12 = std::exp(detail::c12_const(ch) + cn + sup_rho(ch));
    k.k22 = std::exp(detail::c12_const(sw) + cn + sup_rho(sw));
    return k;
}

} // namespace icdisp
