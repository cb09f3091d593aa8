#pragma once

// Second-order capacity regions of the strictly very strong Gaussian IC:
// case dispatch, membership, boundary tracing and the two-term normal
// approximation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "special.hpp"

namespace icdisp {

/// A first-order operating point (kappa1, kappa2) with error budget epsilon.
struct TargetPoint {
    double kappa1, kappa2, epsilon;

    void validate() const {
        if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !std::isfinite(kappa1) ||
            !std::isfinite(kappa2))
            throw std::domain_error("TargetPoint: kappas must be finite and nonnegative");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::domain_error("TargetPoint: epsilon must lie in (0,1)");
    }
};

enum class RegionCase { Vertical, Corner, Horizontal, Interior, Exterior };

inline const char* to_string(RegionCase c) {
    switch (c) {
        case RegionCase::Vertical: return "vertical";
        case RegionCase::Corner: return "corner";
        case RegionCase::Horizontal: return "horizontal";
        case RegionCase::Interior: return "interior";
        case RegionCase::Exterior: return "exterior";
    }
    return "?";
}

/// Case descriptor of the (kappa1, kappa2, epsilon) second-order region.
/// Interior means all of R^2, Exterior the empty set; the boundary cases
/// carry the dispersions that shape the region.
struct RegionSpec {
    RegionCase kase;
    double v1, v2;
    double epsilon;
};

struct SecondOrderPoint {
    double l1, l2;
};

/// Dispatches a target point to its region case. Equality of kappa_j with
/// the capacity corner is tested within kappa_rel_tol (relative). Channels
/// on the very-strong boundary are refused: the region is only
/// characterized under strict inequalities.
inline RegionSpec classify_target(const ChannelParams& ch, const TargetPoint& tp,
                                  double kappa_rel_tol = 1e-9) {
    tp.validate();
    if (!classify_regime(ch).strictly_very_strong())
        throw std::domain_error(
            "classify_target: channel must have strictly very strong interference");
    const FirstOrder fo = first_order(ch);
    const SecondOrder so = second_order(ch);

    auto cmp = [kappa_rel_tol](double kappa, double cap) {
        const double tol = kappa_rel_tol * std::max({std::abs(kappa), std::abs(cap), 1e-300});
        if (std::abs(kappa - cap) <= tol) return 0;
        return kappa < cap ? -1 : 1;
    };
    const int c1 = cmp(tp.kappa1, fo.i11);
    const int c2 = cmp(tp.kappa2, fo.i21);

    RegionCase kase;
    if (c1 > 0 || c2 > 0)
        kase = RegionCase::Exterior;
    else if (c1 == 0 && c2 == 0)
        kase = RegionCase::Corner;
    else if (c1 == 0)
        kase = RegionCase::Vertical;
    else if (c2 == 0)
        kase = RegionCase::Horizontal;
    else
        kase = RegionCase::Interior;
    return RegionSpec{kase, so.v1, so.v2, tp.epsilon};
}

/// Membership test. The defining probability inequalities are evaluated
/// with a 1e-10 absolute slack so that exact boundary points (which are in
/// the closure) test as members under roundoff.
inline bool contains(const RegionSpec& spec, SecondOrderPoint pt) {
    if (!std::isfinite(pt.l1) || !std::isfinite(pt.l2))
        throw std::domain_error("contains: point must be finite");
    constexpr double kSlack = 1e-10;
    switch (spec.kase) {
        case RegionCase::Interior: return true;
        case RegionCase::Exterior: return false;
        case RegionCase::Vertical:
            return std_normal_cdf(pt.l1 / std::sqrt(spec.v1)) <= spec.epsilon + kSlack;
        case RegionCase::Horizontal:
            return std_normal_cdf(pt.l2 / std::sqrt(spec.v2)) <= spec.epsilon + kSlack;
        case RegionCase::Corner:
            return std_normal_cdf(-pt.l1 / std::sqrt(spec.v1)) *
                       std_normal_cdf(-pt.l2 / std::sqrt(spec.v2)) >=
                   1.0 - spec.epsilon - kSlack;
    }
    return false;
}

/// Boundary curve of the corner-case region, sampled at `grid` points.
struct BoundaryTrace {
    std::vector<SecondOrderPoint> points;
    double l1_lo, l1_hi; // traced parameter window
    double clip;         // probability inset applied at both window ends
};

/// Traces l2(l1) = -sqrt(v2) PhiInv((1-eps) / Phi(-l1/sqrt(v1))) over the
/// window where Phi(-l1/sqrt(v1)) exceeds 1-eps. The window is clipped
/// where the excess drops below `clip` (the curve runs to -inf there); the
/// clip and window are reported alongside the points.
inline BoundaryTrace trace_boundary(const RegionSpec& spec, int grid, double clip = 1e-14) {
    if (spec.kase != RegionCase::Corner)
        throw std::domain_error("trace_boundary: only the corner case has a boundary curve");
    if (grid < 2) throw std::invalid_argument("trace_boundary: grid must be >= 2");

    const double s1 = std::sqrt(spec.v1);
    const double s2 = std::sqrt(spec.v2);
    const double q = 1.0 - spec.epsilon;
    // feasible: Phi(-l1/s1) > q, i.e. l1 < -s1 PhiInv(q)
    const double hi = -s1 * std_normal_quantile(std::min(q + clip, 1.0 - 1e-16));
    const double lo = -s1 * std_normal_quantile(std::min(q / (q + clip), 1.0 - 1e-16));

    BoundaryTrace out;
    out.l1_lo = lo;
    out.l1_hi = hi;
    out.clip = clip;
    out.points.reserve(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double l1 =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
        const double p1 = std_normal_cdf(-l1 / s1);
        const double l2 = -s2 * std_normal_quantile(std::min(q / p1, 1.0 - 1e-16));
        out.points.push_back({l1, l2});
    }
    return out;
}

/// Two-term normal approximation n C + sqrt(n V) PhiInv(eps) for the given
/// user's direct link, in nats (the log n refinement is out of scope here).
inline double normal_approximation(const ChannelParams& ch, std::int64_t n, double epsilon,
                                   int user) {
    ch.validate();
    if (n < 1) throw std::domain_error("normal_approximation: n must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("normal_approximation: epsilon must lie in (0,1)");
    if (user != 1 && user != 2)
        throw std::invalid_argument("normal_approximation: user must be 1 or 2");
    const double snr = user == 1 ? ch.snr1() : ch.snr2();
    const double nn = static_cast<double>(n);
    return nn * gaussian_capacity(snr) +
           std::sqrt(nn * gaussian_dispersion(snr)) * std_normal_quantile(epsilon);
}

} // namespace icdisp
