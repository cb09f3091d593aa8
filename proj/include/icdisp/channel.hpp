#pragma once

// Two-user Gaussian interference channel parameterization: regime
// classification, first-order rate quantities, and the second-order
// dispersion matrices.

#include <array>
#include <cmath>
#include <stdexcept>

#include "linalg.hpp"
#include "special.hpp"

namespace icdisp {

/// Channel gains h_jk (from transmitter j into receiver k) and per-user
/// power budgets. All fields must be positive and finite.
struct ChannelParams {
    double h11, h12, h21, h22;
    double p1, p2;

    void validate() const {
        const double v[6] = {h11, h12, h21, h22, p1, p2};
        for (double x : v)
            if (!(x > 0.0) || !std::isfinite(x))
                throw std::domain_error("ChannelParams: gains and powers must be positive and finite");
    }

    double snr1() const { return h11 * h11 * p1; }
    double snr2() const { return h22 * h22 * p2; }
};

/// Same channel with the user roles exchanged.
inline ChannelParams swap_users(const ChannelParams& ch) {
    return ChannelParams{ch.h22, ch.h21, ch.h12, ch.h11, ch.p2, ch.p1};
}

enum class RegimeTag { NotVeryStrong, VeryStrongBoundary, StrictlyVeryStrong };

/// Classification result together with the two inequality margins
///   slack1 = h21^2/(1+h11^2 p1) - h22^2,
///   slack2 = h12^2/(1+h22^2 p2) - h11^2.
struct Regime {
    RegimeTag tag;
    double slack1, slack2;

    bool strictly_very_strong() const { return tag == RegimeTag::StrictlyVeryStrong; }
    bool very_strong() const { return tag != RegimeTag::NotVeryStrong; }
};

/// Classifies the interference regime. Slacks within a 1e-12 relative guard
/// band of zero count as exact equality; both slacks are reported so callers
/// can apply their own policy near the boundary.
inline Regime classify_regime(const ChannelParams& ch) {
    ch.validate();
    const double lhs1 = ch.h21 * ch.h21 / (1.0 + ch.snr1());
    const double lhs2 = ch.h12 * ch.h12 / (1.0 + ch.snr2());
    const double s1 = lhs1 - ch.h22 * ch.h22;
    const double s2 = lhs2 - ch.h11 * ch.h11;
    const double guard1 = 1e-12 * std::max(lhs1, ch.h22 * ch.h22);
    const double guard2 = 1e-12 * std::max(lhs2, ch.h11 * ch.h11);

    RegimeTag tag;
    if (s1 < -guard1 || s2 < -guard2)
        tag = RegimeTag::NotVeryStrong;
    else if (s1 > guard1 && s2 > guard2)
        tag = RegimeTag::StrictlyVeryStrong;
    else
        tag = RegimeTag::VeryStrongBoundary;
    return Regime{tag, s1, s2};
}

/// First-order quantities, nats per channel use:
///   i11 = C(h11^2 p1)            i12 = C(h11^2 p1 + h21^2 p2)
///   i21 = C(h22^2 p2)            i22 = C(h22^2 p2 + h12^2 p1)
struct FirstOrder {
    double i11, i21, i12, i22;
};

inline FirstOrder first_order(const ChannelParams& ch) {
    ch.validate();
    return FirstOrder{gaussian_capacity(ch.snr1()), gaussian_capacity(ch.snr2()),
                      gaussian_capacity(ch.snr1() + ch.h21 * ch.h21 * ch.p2),
                      gaussian_capacity(ch.snr2() + ch.h12 * ch.h12 * ch.p1)};
}

/// Noise-plus-signal variances of the four auxiliary output distributions
/// and the extra covariance coefficients of the lifted moment vector.
struct Alphas {
    double a11, a12, a21, a22;
    double a33, a44, a48, a77, a88;
};

inline Alphas alphas_of(const ChannelParams& ch) {
    ch.validate();
    Alphas a;
    a.a11 = 1.0 + ch.h11 * ch.h11 * ch.p1;
    a.a12 = 1.0 + ch.h11 * ch.h11 * ch.p1 + ch.h21 * ch.h21 * ch.p2;
    a.a21 = 1.0 + ch.h22 * ch.h22 * ch.p2;
    a.a22 = 1.0 + ch.h12 * ch.h12 * ch.p1 + ch.h22 * ch.h22 * ch.p2;
    a.a33 = ch.h21 * ch.h21 * ch.p2;
    a.a44 = ch.h11 * ch.h11 * ch.h21 * ch.h21 * ch.p1 * ch.p2;
    a.a48 = ch.p1 * ch.p2 * ch.h11 * ch.h21 * ch.h12 * ch.h22;
    a.a77 = ch.h12 * ch.h12 * ch.p1;
    a.a88 = ch.h12 * ch.h12 * ch.h22 * ch.h22 * ch.p1 * ch.p2;
    return a;
}

/// Covariance of the per-letter 10-dimensional moment vector. Diagonal
/// [2, a11-1, a33, a44, 2, a21-1, a77, a88, 2, 2] with the single coupling
/// a48 between components 3 and 7 (0-based).
inline Mat10 moment_covariance(const Alphas& a) {
    Mat10 cov = zeros<10, 10>();
    const double diag[10] = {2.0, a.a11 - 1.0, a.a33, a.a44, 2.0,
                             a.a21 - 1.0, a.a77, a.a88, 2.0, 2.0};
    for (std::size_t i = 0; i < 10; ++i) cov[i][i] = diag[i];
    cov[3][7] = cov[7][3] = a.a48;
    return cov;
}

/// Jacobian of the tau map at the origin, rows ordered (11, 21, 12, 22).
inline Matrix<4, 10> tau_jacobian(const Alphas& a) {
    Matrix<4, 10> j = zeros<4, 10>();
    j[0][0] = a.a11 - 1.0;
    j[0][1] = 2.0;
    j[1][4] = a.a21 - 1.0;
    j[1][5] = 2.0;
    j[2][0] = a.a12 - 1.0;
    j[2][1] = 2.0;
    j[2][2] = 2.0;
    j[2][3] = 2.0;
    j[3][4] = a.a22 - 1.0;
    j[3][5] = 2.0;
    j[3][6] = 2.0;
    j[3][7] = 2.0;
    return j;
}

/// Second-order quantities: the single-user dispersions v1, v2 and the 4x4
/// asymptotic covariance vd of the density vector, assembled as the exact
/// matrix product (1/4) Lambda J Cov Jt Lambda from the alpha table.
struct SecondOrder {
    double v1, v2;
    Mat4 vd;
    Alphas alphas;
};

inline SecondOrder second_order(const ChannelParams& ch) {
    const Alphas a = alphas_of(ch);
    SecondOrder so;
    so.alphas = a;
    so.v1 = gaussian_dispersion(ch.snr1());
    so.v2 = gaussian_dispersion(ch.snr2());

    const Matrix<4, 10> j = tau_jacobian(a);
    const Mat10 cov = moment_covariance(a);
    const Mat4 core = matmul(matmul(j, cov), transpose(j));
    const double lam[4] = {1.0 / a.a11, 1.0 / a.a21, 1.0 / a.a12, 1.0 / a.a22};
    so.vd = zeros<4, 4>();
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = r; c < 4; ++c) {
            // upper triangle mirrored so the product is symmetric to the bit
            so.vd[r][c] = 0.25 * lam[r] * core[r][c] * lam[c];
            so.vd[c][r] = so.vd[r][c];
        }
    return so;
}

// Named entries of vd exposed individually; each is read off the assembled
// matrix product (the cross entries have no one-argument dispersion form).
inline double vd13(const SecondOrder& so) { return so.vd[0][2]; }
inline double vd24(const SecondOrder& so) { return so.vd[1][3]; }
inline double vd33(const SecondOrder& so) { return so.vd[2][2]; }
inline double vd34(const SecondOrder& so) { return so.vd[2][3]; }
inline double vd44(const SecondOrder& so) { return so.vd[3][3]; }

/// Independent assembly of vd from entrywise closed forms: the dispersion
/// function on the diagonal blocks, the cross entries
///   vd[0][2] = (a11-1)(a12+1) / (2 a11 a12)   (and the 1<->3 analogue),
///   vd[2][3] = a48 / (a12 a22),
/// and zeros elsewhere. Agrees with the matrix product to roundoff; kept as
/// a second assembly route for consistency checks.
inline Mat4 vd_closed_form(const Alphas& a) {
    Mat4 m = zeros<4, 4>();
    auto disp = [](double s) { return gaussian_dispersion(s); };
    m[0][0] = disp(a.a11 - 1.0);
    m[1][1] = disp(a.a21 - 1.0);
    m[2][2] = disp(a.a12 - 1.0) + a.a44 / (a.a12 * a.a12);
    m[3][3] = disp(a.a22 - 1.0) + a.a88 / (a.a22 * a.a22);
    m[0][2] = m[2][0] = (a.a11 - 1.0) * (a.a12 + 1.0) / (2.0 * a.a11 * a.a12);
    m[1][3] = m[3][1] = (a.a21 - 1.0) * (a.a22 + 1.0) / (2.0 * a.a21 * a.a22);
    m[2][3] = m[3][2] = a.a48 / (a.a12 * a.a22);
    return m;
}

/// Corners of the first-order capacity rectangle, counter-clockwise from
/// the origin. Only defined in the (strictly or boundary) very strong
/// interference regime.
inline std::array<std::array<double, 2>, 4> capacity_region_vertices(const ChannelParams& ch) {
    if (!classify_regime(ch).very_strong())
        throw std::domain_error(
            "capacity_region_vertices: rectangle formula requires very strong interference");
    const FirstOrder fo = first_order(ch);
    return {{{0.0, 0.0}, {fo.i11, 0.0}, {fo.i11, fo.i21}, {0.0, fo.i21}}};
}

} // namespace icdisp
