#pragma once

// Finite-blocklength bound evaluation: Monte-Carlo estimates of the
// threshold-decoder achievability bound and the two-event converse bound,
// and the comparison of both against the asymptotic region prediction.
//
// Both bounds are functions of the information densities alone, so no
// explicit codebooks are ever built.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "analytic_bounds.hpp"
#include "channel.hpp"
#include "densities.hpp"
#include "region.hpp"
#include "rng.hpp"

namespace icdisp {

/// Code parameters entering the bounds: blocklength, log code sizes in
/// nats, and the threshold slack gamma (nats per channel use).
struct CodeSpec {
    int n;
    double log_m1, log_m2;
    double gamma;

    /// gamma = log(n) / (2n), the slack used throughout the evaluations.
    static double default_gamma(int n) {
        return std::log(static_cast<double>(n)) / (2.0 * static_cast<double>(n));
    }

    static CodeSpec make(int n, double log_m1, double log_m2,
                         std::optional<double> gamma = std::nullopt) {
        CodeSpec s{n, log_m1, log_m2, gamma.value_or(default_gamma(n))};
        s.validate();
        return s;
    }

    void validate() const {
        if (n < 2) throw std::domain_error("CodeSpec: n must be >= 2");
        if (!(log_m1 >= 0.0) || !(log_m2 >= 0.0) || !std::isfinite(log_m1) ||
            !std::isfinite(log_m2))
            throw std::domain_error("CodeSpec: log code sizes must be finite and >= 0");
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::domain_error("CodeSpec: gamma must be positive");
    }
};

enum class BoundKind { AchievabilityUpper, ConverseLower };

/// A Monte-Carlo bound value. `value` is the bound itself (clamped into
/// [0,1]); the raw event probability and the additive constant are exposed
/// separately so the gamma tradeoff stays inspectable.
struct BoundEstimate {
    BoundKind kind;
    double value = 0.0;
    double std_error = 0.0; // binomial std error of the event probability
    std::uint64_t trials = 0;
    double event_prob = 0.0;    // union-probability estimate before constants
    double additive_term = 0.0; // K e^{-n gamma} (ach) or 2 e^{-n gamma} (conv)
};

struct BoundOptions {
    int threads = 1;
    std::optional<double> k_constant; // overrides the analytic K estimate
};

namespace detail {

struct EventCounts {
    std::uint64_t ach = 0;
    std::uint64_t conv = 0;
    std::uint64_t count = 0;
};

// One pass over the trials counting both unions on shared randomness.
inline EventCounts count_events(const ChannelParams& ch, const CodeSpec& spec,
                                std::uint64_t trials, std::uint64_t seed, int threads) {
    const double n = static_cast<double>(spec.n);
    const double ng = n * spec.gamma;
    const double lm12 = spec.log_m1 + spec.log_m2;
    const std::size_t nchunks =
        static_cast<std::size_t>((trials + kTrialChunk - 1) / kTrialChunk);
    std::vector<EventCounts> parts(nchunks);

    run_chunked(trials, threads, [&](std::size_t c, std::uint64_t first, std::uint64_t last) {
        EventCounts acc;
        SphereSample s;
        s.n = spec.n;
        s.z1.resize(static_cast<std::size_t>(spec.n));
        s.z2.resize(static_cast<std::size_t>(spec.n));
        for (std::uint64_t t = first; t < last; ++t) {
            detail::draw_shell(s.t1, s.x1, spec.n, ch.p1, seed, t, detail::kStreamT1);
            detail::draw_shell(s.t2, s.x2, spec.n, ch.p2, seed, t, detail::kStreamT2);
            CounterRng rz1(seed, t, detail::kStreamZ1);
            CounterRng rz2(seed, t, detail::kStreamZ2);
            rz1.fill_gaussian(s.z1.data(), s.z1.size());
            rz2.fill_gaussian(s.z2.data(), s.z2.size());
            const DensitySample d = info_densities_closed_form(ch, s);
            const bool ach = d.i11 <= spec.log_m1 + ng || d.i21 <= spec.log_m2 + ng ||
                             d.i12 <= lm12 + ng || d.i22 <= lm12 + ng;
            const bool conv = d.i11 <= spec.log_m1 - ng || d.i21 <= spec.log_m2 - ng;
            acc.ach += ach ? 1 : 0;
            acc.conv += conv ? 1 : 0;
            ++acc.count;
        }
        parts[c] = acc;
    });

    EventCounts total;
    for (const auto& p : parts) {
        total.ach += p.ach;
        total.conv += p.conv;
        total.count += p.count;
    }
    return total;
}

inline double binomial_se(double p, double trials) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
}

inline double default_k(const ChannelParams& ch, int n) {
    // analytic estimate with a safety factor of 2; the estimate itself is
    // an upper bound only up to the vanishing slack sequences
    return 2.0 * k_estimate(ch, std::max(n, 10)).total();
}

} // namespace detail

/// Pr(E11 u E12 u E21 u E22) + K e^{-n gamma}, the threshold-decoder upper
/// bound on the error probability. The input-power failure terms are zero
/// by the shell construction.
inline BoundEstimate achievability_bound(const ChannelParams& ch, const CodeSpec& spec,
                                         std::uint64_t trials, std::uint64_t seed,
                                         const BoundOptions& opt = {}) {
    ch.validate();
    spec.validate();
    if (trials < 100) throw std::domain_error("achievability_bound: needs >= 100 trials");
    const auto counts = detail::count_events(ch, spec, trials, seed, opt.threads);
    const double tN = static_cast<double>(counts.count);
    BoundEstimate out;
    out.kind = BoundKind::AchievabilityUpper;
    out.trials = counts.count;
    out.event_prob = static_cast<double>(counts.ach) / tN;
    out.std_error = detail::binomial_se(out.event_prob, tN);
    const double k = opt.k_constant.value_or(detail::default_k(ch, spec.n));
    out.additive_term = k * std::exp(-static_cast<double>(spec.n) * spec.gamma);
    out.value = std::min(out.event_prob + out.additive_term, 1.0);
    return out;
}

/// Pr(i11 <= log M1 - n gamma or i21 <= log M2 - n gamma) - 2 e^{-n gamma},
/// clamped at zero: a lower bound on the error probability of every code.
/// The event statistics are codeword-independent on the power shells, so a
/// uniform shell draw evaluates them for all codes at once.
inline BoundEstimate converse_bound(const ChannelParams& ch, const CodeSpec& spec,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const BoundOptions& opt = {}) {
    ch.validate();
    spec.validate();
    if (trials < 100) throw std::domain_error("converse_bound: needs >= 100 trials");
    const auto counts = detail::count_events(ch, spec, trials, seed, opt.threads);
    const double tN = static_cast<double>(counts.count);
    BoundEstimate out;
    out.kind = BoundKind::ConverseLower;
    out.trials = counts.count;
    out.event_prob = static_cast<double>(counts.conv) / tN;
    out.std_error = detail::binomial_se(out.event_prob, tN);
    out.additive_term = 2.0 * std::exp(-static_cast<double>(spec.n) * spec.gamma);
    out.value = std::max(out.event_prob - out.additive_term, 0.0);
    return out;
}

/// One row of the blocklength sweep at a second-order operating point.
struct ExperimentRow {
    int n;
    double ach_event_prob, ach_se, ach_additive;
    double conv_value, conv_event_prob, conv_se, conv_additive;
    double prediction; // 1 - Phi(-l1/sqrt(V1)) Phi(-l2/sqrt(V2))

    double ach_bound() const { return ach_event_prob + ach_additive; }
};

struct ExperimentTable {
    SecondOrderPoint point;
    double kappa1, kappa2, epsilon;
    std::vector<ExperimentRow> rows;
};

/// For each n sets log M_jn = n kappa_j + sqrt(n) l_j, evaluates both
/// bounds on a shared trial budget, and tabulates them against the
/// n-independent region prediction. Requires a corner-case target.
inline ExperimentTable second_order_experiment(const ChannelParams& ch, const TargetPoint& tp,
                                               SecondOrderPoint pt,
                                               const std::vector<int>& n_list,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const BoundOptions& opt = {}) {
    const RegionSpec spec = classify_target(ch, tp);
    if (spec.kase != RegionCase::Corner)
        throw std::domain_error("second_order_experiment: target must be the corner point");
    if (trials < 100) throw std::domain_error("second_order_experiment: needs >= 100 trials");
    if (!std::isfinite(pt.l1) || !std::isfinite(pt.l2))
        throw std::domain_error("second_order_experiment: point must be finite");

    const double prediction = 1.0 - std_normal_cdf(-pt.l1 / std::sqrt(spec.v1)) *
                                        std_normal_cdf(-pt.l2 / std::sqrt(spec.v2));
    ExperimentTable table;
    table.point = pt;
    table.kappa1 = tp.kappa1;
    table.kappa2 = tp.kappa2;
    table.epsilon = tp.epsilon;
    for (int n : n_list) {
        const double sn = std::sqrt(static_cast<double>(n));
        const CodeSpec cs = CodeSpec::make(
            n, std::max(0.0, static_cast<double>(n) * tp.kappa1 + sn * pt.l1),
            std::max(0.0, static_cast<double>(n) * tp.kappa2 + sn * pt.l2));
        const auto counts = detail::count_events(ch, cs, trials, seed, opt.threads);
        const double tN = static_cast<double>(counts.count);
        ExperimentRow row;
        row.n = n;
        row.ach_event_prob = static_cast<double>(counts.ach) / tN;
        row.ach_se = detail::binomial_se(row.ach_event_prob, tN);
        const double k = opt.k_constant.value_or(detail::default_k(ch, n));
        row.ach_additive = k * std::exp(-static_cast<double>(n) * cs.gamma);
        row.conv_event_prob = static_cast<double>(counts.conv) / tN;
        row.conv_se = detail::binomial_se(row.conv_event_prob, tN);
        row.conv_additive = 2.0 * std::exp(-static_cast<double>(n) * cs.gamma);
        row.conv_value = std::max(row.conv_event_prob - row.conv_additive, 0.0);
        row.prediction = prediction;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace icdisp
