#pragma once

// Monte-Carlo engine for the modified information densities: power-shell
// codeword sampling, the closed-form and per-letter log-ratio evaluations,
// the 10-dimensional moment-vector machinery, and empirical moment
// verification.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace icdisp {

/// One blocklength-n draw: codewords x1, x2 uniform on their power shells
/// (x_j = sqrt(n p_j) t_j / ||t_j||), noises z1, z2 iid standard normal,
/// and the pre-normalization Gaussians t1, t2.
struct SphereSample {
    int n = 0;
    std::vector<double> x1, x2, z1, z2, t1, t2;
};

namespace detail {

// stream ids within a trial; resample attempts shift by 8
enum : std::uint32_t { kStreamT1 = 0, kStreamT2 = 1, kStreamZ1 = 2, kStreamZ2 = 3, kStreamAux = 4 };

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void draw_shell(std::vector<double>& t, std::vector<double>& x, int n, double power,
                       std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
    t.resize(static_cast<std::size_t>(n));
    x.resize(static_cast<std::size_t>(n));
    for (std::uint32_t attempt = 0;; ++attempt) {
        CounterRng rng(seed, trial, stream + 8 * attempt);
        rng.fill_gaussian(t.data(), t.size());
        const double nt = std::sqrt(norm2(t));
        if (nt > 0.0) { // zero norm has probability zero; redraw on a fresh substream
            const double scale = std::sqrt(static_cast<double>(n) * power) / nt;
            for (int k = 0; k < n; ++k)
                x[static_cast<std::size_t>(k)] = scale * t[static_cast<std::size_t>(k)];
            return;
        }
    }
}

} // namespace detail

/// Draws one SphereSample, deterministic in (seed, trial).
inline SphereSample sample_sphere_block(const ChannelParams& ch, int n, std::uint64_t seed,
                                        std::uint64_t trial = 0) {
    ch.validate();
    if (n < 2) throw std::domain_error("sample_sphere_block: n must be >= 2");
    SphereSample s;
    s.n = n;
    detail::draw_shell(s.t1, s.x1, n, ch.p1, seed, trial, detail::kStreamT1);
    detail::draw_shell(s.t2, s.x2, n, ch.p2, seed, trial, detail::kStreamT2);
    s.z1.resize(static_cast<std::size_t>(n));
    s.z2.resize(static_cast<std::size_t>(n));
    CounterRng rz1(seed, trial, detail::kStreamZ1);
    CounterRng rz2(seed, trial, detail::kStreamZ2);
    rz1.fill_gaussian(s.z1.data(), s.z1.size());
    rz2.fill_gaussian(s.z2.data(), s.z2.size());
    return s;
}

/// Realized modified information densities of one block, in nats.
struct DensitySample {
    double i11, i21, i12, i22;
};

/// Densities via the inner-product closed forms. Assumes the codewords lie
/// on their power shells, which SphereSample guarantees by construction.
inline DensitySample info_densities_closed_form(const ChannelParams& ch,
                                                const SphereSample& s) {
    const Alphas a = alphas_of(ch);
    const FirstOrder fo = first_order(ch);
    const double n = static_cast<double>(s.n);
    const double rz1 = n - detail::norm2(s.z1);
    const double rz2 = n - detail::norm2(s.z2);
    const double x1z1 = detail::dot(s.x1, s.z1);
    const double x2z2 = detail::dot(s.x2, s.z2);
    const double x2x1 = detail::dot(s.x2, s.x1);
    const double x2z1 = detail::dot(s.x2, s.z1);
    const double x1z2 = detail::dot(s.x1, s.z2);

    DensitySample d;
    d.i11 = n * fo.i11 + ((a.a11 - 1.0) * rz1 + 2.0 * ch.h11 * x1z1) / (2.0 * a.a11);
    d.i21 = n * fo.i21 + ((a.a21 - 1.0) * rz2 + 2.0 * ch.h22 * x2z2) / (2.0 * a.a21);
    d.i12 = n * fo.i12 + ((a.a12 - 1.0) * rz1 + 2.0 * ch.h11 * ch.h21 * x2x1 +
                          2.0 * ch.h11 * x1z1 + 2.0 * ch.h21 * x2z1) /
                             (2.0 * a.a12);
    d.i22 = n * fo.i22 + ((a.a22 - 1.0) * rz2 + 2.0 * ch.h22 * ch.h12 * x2x1 +
                          2.0 * ch.h22 * x2z2 + 2.0 * ch.h12 * x1z2) /
                             (2.0 * a.a22);
    return d;
}

namespace detail {

inline double log_normal_density(double y, double mean, double var) {
    const double r = y - mean;
    return -0.5 * std::log(2.0 * M_PI * var) - r * r / (2.0 * var);
}

} // namespace detail

/// Densities summed letter by letter as log ratios of Gaussian densities
/// against the four auxiliary output laws. O(n) per density; serves as the
/// independent oracle for the closed-form path. Works for arbitrary finite
/// inputs (no shell assumption).
inline DensitySample info_densities_log_ratio(const ChannelParams& ch,
                                              const SphereSample& s) {
    const Alphas a = alphas_of(ch);
    double i11 = 0.0, i21 = 0.0, i12 = 0.0, i22 = 0.0;
    for (std::size_t k = 0; k < s.z1.size(); ++k) {
        const double y1 = ch.h11 * s.x1[k] + ch.h21 * s.x2[k] + s.z1[k];
        const double y2 = ch.h12 * s.x1[k] + ch.h22 * s.x2[k] + s.z2[k];
        const double w1 = detail::log_normal_density(y1, ch.h11 * s.x1[k] + ch.h21 * s.x2[k], 1.0);
        const double w2 = detail::log_normal_density(y2, ch.h12 * s.x1[k] + ch.h22 * s.x2[k], 1.0);
        i11 += w1 - detail::log_normal_density(y1, ch.h21 * s.x2[k], a.a11);
        i12 += w1 - detail::log_normal_density(y1, 0.0, a.a12);
        i21 += w2 - detail::log_normal_density(y2, ch.h12 * s.x1[k], a.a21);
        i22 += w2 - detail::log_normal_density(y2, 0.0, a.a22);
    }
    return DensitySample{i11, i21, i12, i22};
}

/// The zero-mean 10-vector of per-letter quadratic statistics, components
/// ordered (11, 21, 31, 41, 12, 22, 32, 42, 9, 10). k is 0-based.
inline std::array<double, 10> moment_vector(const ChannelParams& ch, const SphereSample& s,
                                            int k) {
    if (k < 0 || k >= s.n) throw std::out_of_range("moment_vector: letter index out of range");
    const auto i = static_cast<std::size_t>(k);
    const double sp1 = std::sqrt(ch.p1), sp2 = std::sqrt(ch.p2);
    return {1.0 - s.z1[i] * s.z1[i],
            ch.h11 * sp1 * s.t1[i] * s.z1[i],
            ch.h21 * sp2 * s.t2[i] * s.z1[i],
            ch.h11 * ch.h21 * sp1 * sp2 * s.t1[i] * s.t2[i],
            1.0 - s.z2[i] * s.z2[i],
            ch.h22 * sp2 * s.t2[i] * s.z2[i],
            ch.h12 * sp1 * s.t1[i] * s.z2[i],
            ch.h12 * ch.h22 * sp1 * sp2 * s.t1[i] * s.t2[i],
            s.t1[i] * s.t1[i] - 1.0,
            s.t2[i] * s.t2[i] - 1.0};
}

inline std::array<double, 10> moment_vector_mean(const ChannelParams& ch,
                                                 const SphereSample& s) {
    std::array<double, 10> acc{};
    for (int k = 0; k < s.n; ++k) {
        const auto u = moment_vector(ch, s, k);
        for (std::size_t j = 0; j < 10; ++j) acc[j] += u[j];
    }
    for (double& v : acc) v /= static_cast<double>(s.n);
    return acc;
}

/// The tau map from block-averaged moment vectors to the four density
/// fluctuations, ordered (11, 21, 12, 22); satisfies
///   i_l = n I_l + (n / 2 alpha_l) tau_l(u_bar)  and  tau(0) = 0.
inline std::array<double, 4> tau(const Alphas& a, const std::array<double, 10>& u) {
    if (!(u[8] > -1.0) || !(u[9] > -1.0))
        throw std::domain_error("tau: needs u[8] > -1 and u[9] > -1");
    const double r1 = std::sqrt(1.0 + u[8]);
    const double r2 = std::sqrt(1.0 + u[9]);
    return {(a.a11 - 1.0) * u[0] + 2.0 * u[1] / r1,
            (a.a21 - 1.0) * u[4] + 2.0 * u[5] / r2,
            (a.a12 - 1.0) * u[0] + 2.0 * u[1] / r1 + 2.0 * u[2] / r2 + 2.0 * u[3] / (r1 * r2),
            (a.a22 - 1.0) * u[4] + 2.0 * u[5] / r2 + 2.0 * u[6] / r1 + 2.0 * u[7] / (r1 * r2)};
}

/// Deterministic on-shell codewords for conditional (fixed-codeword) runs.
/// Patterns: 0 constant, 1 alternating sign, 2 linear ramp, 3 single spike;
/// higher ids give pseudorandom shells keyed by the id.
inline std::vector<double> on_sphere_codeword(int n, double power, int pattern) {
    if (n < 1 || !(power > 0.0))
        throw std::invalid_argument("on_sphere_codeword: need n >= 1 and power > 0");
    std::vector<double> v(static_cast<std::size_t>(n));
    switch (pattern) {
        case 0:
            for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = 1.0;
            break;
        case 1:
            for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = (k % 2 == 0) ? 1.0 : -1.0;
            break;
        case 2:
            for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = static_cast<double>(k + 1);
            break;
        case 3:
            v[0] = 1.0;
            break;
        default: {
            CounterRng rng(0x5eedc0deu, static_cast<std::uint64_t>(pattern), 0);
            rng.fill_gaussian(v.data(), v.size());
            break;
        }
    }
    const double nv = std::sqrt(detail::norm2(v));
    const double scale = std::sqrt(static_cast<double>(n) * power) / nv;
    for (double& x : v) x *= scale;
    return v;
}

/// Aggregated density statistics over Monte-Carlo trials: mean of i/n,
/// covariance (and its standard errors) of i/sqrt(n), and the per-letter
/// third absolute moment of the centered converse pair.
struct EmpiricalStats {
    std::uint64_t trials = 0;
    int n = 0;
    std::array<double, 4> mean{};
    std::array<double, 4> mean_se{};
    Mat4 cov{};
    Mat4 cov_se{};
    double third_abs_moment = 0.0;
};

enum class CodewordMode { Resample, Fixed };

struct StatsOptions {
    CodewordMode mode = CodewordMode::Resample;
    const std::vector<double>* x1 = nullptr; // required in Fixed mode
    const std::vector<double>* x2 = nullptr;
    int threads = 1;
};

namespace detail {

struct StatsAccum {
    std::uint64_t count = 0;
    std::array<double, 4> sum{};
    std::array<std::array<double, 4>, 4> outer{};
    double t3 = 0.0;

    void merge(const StatsAccum& o) {
        count += o.count;
        for (int i = 0; i < 4; ++i) {
            sum[static_cast<std::size_t>(i)] += o.sum[static_cast<std::size_t>(i)];
            for (int j = 0; j < 4; ++j)
                outer[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    o.outer[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        t3 += o.t3;
    }
};

// per-letter converse densities and their conditional means, used for the
// third-absolute-moment accumulator
inline double letter_i11(const ChannelParams& ch, const Alphas& a, double x1k, double z1k) {
    const double w = z1k + ch.h11 * x1k;
    return 0.5 * std::log(a.a11) + w * w / (2.0 * a.a11) - z1k * z1k / 2.0;
}

inline double letter_i21(const ChannelParams& ch, const Alphas& a, double x2k, double z2k) {
    const double w = z2k + ch.h22 * x2k;
    return 0.5 * std::log(a.a21) + w * w / (2.0 * a.a21) - z2k * z2k / 2.0;
}

inline double letter_mean_i11(const ChannelParams& ch, const Alphas& a, double x1k) {
    return 0.5 * std::log(a.a11) + (1.0 + ch.h11 * ch.h11 * x1k * x1k) / (2.0 * a.a11) - 0.5;
}

inline double letter_mean_i21(const ChannelParams& ch, const Alphas& a, double x2k) {
    return 0.5 * std::log(a.a21) + (1.0 + ch.h22 * ch.h22 * x2k * x2k) / (2.0 * a.a21) - 0.5;
}

} // namespace detail

/// Estimates the density moments over `trials` independent blocks.
/// Deterministic given (seed); partitioning across threads does not change
/// the result because partial sums are merged in chunk order.
inline EmpiricalStats empirical_stats(const ChannelParams& ch, int n, std::uint64_t trials,
                                      std::uint64_t seed, const StatsOptions& opt = {}) {
    ch.validate();
    if (n < 2) throw std::domain_error("empirical_stats: n must be >= 2");
    if (trials < 1000) throw std::domain_error("empirical_stats: needs at least 1e3 trials");
    if (opt.mode == CodewordMode::Fixed) {
        if (!opt.x1 || !opt.x2 || static_cast<int>(opt.x1->size()) != n ||
            static_cast<int>(opt.x2->size()) != n)
            throw std::invalid_argument("empirical_stats: fixed mode needs length-n codewords");
    }

    const Alphas a = alphas_of(ch);
    const double dn = static_cast<double>(n);
    const double sqn = std::sqrt(dn);
    const std::size_t nchunks =
        static_cast<std::size_t>((trials + kTrialChunk - 1) / kTrialChunk);
    std::vector<detail::StatsAccum> parts(nchunks);

    run_chunked(trials, opt.threads, [&](std::size_t c, std::uint64_t first, std::uint64_t last) {
        detail::StatsAccum acc;
        SphereSample s;
        s.n = n;
        if (opt.mode == CodewordMode::Fixed) {
            s.x1 = *opt.x1;
            s.x2 = *opt.x2;
        }
        s.z1.resize(static_cast<std::size_t>(n));
        s.z2.resize(static_cast<std::size_t>(n));
        for (std::uint64_t t = first; t < last; ++t) {
            if (opt.mode == CodewordMode::Resample) {
                detail::draw_shell(s.t1, s.x1, n, ch.p1, seed, t, detail::kStreamT1);
                detail::draw_shell(s.t2, s.x2, n, ch.p2, seed, t, detail::kStreamT2);
            }
            CounterRng rz1(seed, t, detail::kStreamZ1);
            CounterRng rz2(seed, t, detail::kStreamZ2);
            rz1.fill_gaussian(s.z1.data(), s.z1.size());
            rz2.fill_gaussian(s.z2.data(), s.z2.size());

            const DensitySample d = info_densities_closed_form(ch, s);
            ++acc.count;
            const double v[4] = {d.i11 / sqn, d.i21 / sqn, d.i12 / sqn, d.i22 / sqn};
            for (int i = 0; i < 4; ++i) {
                acc.sum[static_cast<std::size_t>(i)] += v[i] / sqn;
                for (int j = 0; j < 4; ++j)
                    acc.outer[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                        v[i] * v[j];
            }
            double t3 = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto ik = static_cast<std::size_t>(k);
                const double d1 = detail::letter_i11(ch, a, s.x1[ik], s.z1[ik]) -
                                  detail::letter_mean_i11(ch, a, s.x1[ik]);
                const double d2 = detail::letter_i21(ch, a, s.x2[ik], s.z2[ik]) -
                                  detail::letter_mean_i21(ch, a, s.x2[ik]);
                t3 += std::pow(d1 * d1 + d2 * d2, 1.5);
            }
            acc.t3 += t3 / dn;
        }
        parts[c] = acc;
    });

    detail::StatsAccum total;
    for (const auto& p : parts) total.merge(p);

    EmpiricalStats out;
    out.trials = trials;
    out.n = n;
    const double tN = static_cast<double>(total.count);
    for (int i = 0; i < 4; ++i)
        out.mean[static_cast<std::size_t>(i)] = total.sum[static_cast<std::size_t>(i)] / tN;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double mi = out.mean[static_cast<std::size_t>(i)] * sqn;
            const double mj = out.mean[static_cast<std::size_t>(j)] * sqn;
            const double second =
                total.outer[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / tN;
            out.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                (second - mi * mj) * tN / (tN - 1.0);
        }
    // standard errors: the blocks are near-Gaussian in the regimes we test,
    // so the Gaussian product-moment formula for cov entries applies
    for (int i = 0; i < 4; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        out.mean_se[ii] = std::sqrt(out.cov[ii][ii] / (dn * tN));
        for (int j = 0; j < 4; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            out.cov_se[ii][jj] = std::sqrt(
                (out.cov[ii][ii] * out.cov[jj][jj] + out.cov[ii][jj] * out.cov[ii][jj]) /
                (tN - 1.0));
        }
    }
    out.third_abs_moment = total.t3 / tN;
    return out;
}

/// Empirical covariance (uncentered; the true mean is zero) and mean of the
/// per-letter moment vector, with exact per-entry standard errors.
struct MomentCovStats {
    std::uint64_t draws = 0;
    std::array<double, 10> mean{};
    std::array<double, 10> mean_se{};
    Mat10 cov{};
    Mat10 cov_se{};
};

inline MomentCovStats empirical_moment_covariance(const ChannelParams& ch,
                                                  std::uint64_t draws, std::uint64_t seed,
                                                  int threads = 1) {
    ch.validate();
    if (draws < 1000)
        throw std::domain_error("empirical_moment_covariance: needs at least 1e3 draws");

    struct Accum {
        std::uint64_t count = 0;
        std::array<double, 10> su{};
        Mat10 sp{};   // sum of products u_i u_j
        Mat10 sp2{};  // sum of squared products
    };
    const std::size_t nchunks =
        static_cast<std::size_t>((draws + kTrialChunk - 1) / kTrialChunk);
    std::vector<Accum> parts(nchunks);
    const double sp1 = std::sqrt(ch.p1), sp2c = std::sqrt(ch.p2);

    run_chunked(draws, threads, [&](std::size_t c, std::uint64_t first, std::uint64_t last) {
        Accum acc;
        acc.sp = zeros<10, 10>();
        acc.sp2 = zeros<10, 10>();
        for (std::uint64_t t = first; t < last; ++t) {
            CounterRng r1(seed, t, detail::kStreamT1);
            CounterRng r2(seed, t, detail::kStreamT2);
            CounterRng r3(seed, t, detail::kStreamZ1);
            CounterRng r4(seed, t, detail::kStreamZ2);
            const double t1 = r1.next_gaussian();
            const double t2 = r2.next_gaussian();
            const double z1 = r3.next_gaussian();
            const double z2 = r4.next_gaussian();
            const std::array<double, 10> u = {1.0 - z1 * z1,
                                              ch.h11 * sp1 * t1 * z1,
                                              ch.h21 * sp2c * t2 * z1,
                                              ch.h11 * ch.h21 * sp1 * sp2c * t1 * t2,
                                              1.0 - z2 * z2,
                                              ch.h22 * sp2c * t2 * z2,
                                              ch.h12 * sp1 * t1 * z2,
                                              ch.h12 * ch.h22 * sp1 * sp2c * t1 * t2,
                                              t1 * t1 - 1.0,
                                              t2 * t2 - 1.0};
            ++acc.count;
            for (std::size_t i = 0; i < 10; ++i) {
                acc.su[i] += u[i];
                for (std::size_t j = i; j < 10; ++j) {
                    const double p = u[i] * u[j];
                    acc.sp[i][j] += p;
                    acc.sp2[i][j] += p * p;
                }
            }
        }
        parts[c] = acc;
    });

    Accum total;
    total.sp = zeros<10, 10>();
    total.sp2 = zeros<10, 10>();
    for (const auto& p : parts) {
        total.count += p.count;
        for (std::size_t i = 0; i < 10; ++i) {
            total.su[i] += p.su[i];
            for (std::size_t j = i; j < 10; ++j) {
                total.sp[i][j] += p.sp[i][j];
                total.sp2[i][j] += p.sp2[i][j];
            }
        }
    }

    MomentCovStats out;
    out.draws = draws;
    const double tN = static_cast<double>(total.count);
    for (std::size_t i = 0; i < 10; ++i) {
        out.mean[i] = total.su[i] / tN;
        const double var_i = total.sp[i][i] / tN - out.mean[i] * out.mean[i];
        out.mean_se[i] = std::sqrt(std::max(var_i, 0.0) / tN);
    }
    out.cov = zeros<10, 10>();
    out.cov_se = zeros<10, 10>();
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i; j < 10; ++j) {
            const double m = total.sp[i][j] / tN;
            const double v = std::max(total.sp2[i][j] / tN - m * m, 0.0);
            out.cov[i][j] = out.cov[j][i] = m;
            out.cov_se[i][j] = out.cov_se[j][i] = std::sqrt(v / tN);
        }
    return out;
}

} // namespace icdisp
