#pragma once

// Small fixed-size dense helpers; everything here is at most 10x10.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace icdisp {

template <std::size_t R, std::size_t C>
using Matrix = std::array<std::array<double, C>, R>;

using Mat4 = Matrix<4, 4>;
using Mat10 = Matrix<10, 10>;

template <std::size_t R, std::size_t C>
inline Matrix<R, C> zeros() {
    Matrix<R, C> m{};
    for (auto& row : m) row.fill(0.0);
    return m;
}

template <std::size_t R, std::size_t K, std::size_t C>
inline Matrix<R, C> matmul(const Matrix<R, K>& a, const Matrix<K, C>& b) {
    Matrix<R, C> out = zeros<R, C>();
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t k = 0; k < K; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < C; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

template <std::size_t R, std::size_t C>
inline Matrix<C, R> transpose(const Matrix<R, C>& a) {
    Matrix<C, R> out{};
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out[j][i] = a[i][j];
    return out;
}

/// Eigenvalues of the leading dim x dim block of a symmetric matrix via
/// cyclic Jacobi rotations, returned in ascending order.
template <std::size_t N>
inline std::array<double, N> symmetric_eigenvalues(Matrix<N, N> a, std::size_t dim = N) {
    if (dim == 0 || dim > N) throw std::invalid_argument("symmetric_eigenvalues: bad dim");
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;
        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < dim; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < dim; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::array<double, N> ev{};
    for (std::size_t i = 0; i < dim; ++i) ev[i] = a[i][i];
    for (std::size_t i = dim; i < N; ++i) ev[i] = 0.0;
    for (std::size_t i = 0; i + 1 < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            if (ev[j] < ev[i]) std::swap(ev[i], ev[j]);
    return ev;
}

template <std::size_t N>
inline double min_eigenvalue(const Matrix<N, N>& a, std::size_t dim = N) {
    return symmetric_eigenvalues<N>(a, dim)[0];
}

/// Cholesky factor of a PSD matrix (leading dim x dim block), lower
/// triangular. Pivots below pivot_tol are treated as exact zeros and the
/// corresponding column is zeroed, which projects out null directions.
/// Returns the numerical rank. Throws if a pivot is negative beyond tol.
template <std::size_t N>
inline std::size_t cholesky_psd(const Matrix<N, N>& a, Matrix<N, N>& chol,
                                std::size_t dim = N, double pivot_tol = 1e-12) {
    chol = zeros<N, N>();
    double scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i) scale = std::max(scale, std::abs(a[i][i]));
    const double tol = pivot_tol * std::max(scale, 1.0);
    std::size_t rank = 0;
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= chol[j][k] * chol[j][k];
        if (d <= tol) {
            if (d < -100.0 * tol)
                throw std::domain_error("cholesky_psd: matrix is not positive semidefinite");
            chol[j][j] = 0.0;
            continue;
        }
        chol[j][j] = std::sqrt(d);
        ++rank;
        for (std::size_t i = j + 1; i < dim; ++i) {
            double v = a[i][j];
            for (std::size_t k = 0; k < j; ++k) v -= chol[i][k] * chol[j][k];
            chol[i][j] = v / chol[j][j];
        }
    }
    return rank;
}

} // namespace icdisp
