#pragma once

// Multivariate normal lower-orthant probabilities Psi and the multivariate
// Berry-Esseen constant.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace icdisp {

/// Mean and covariance of a Gaussian in dimension 1..4, with the PSD
/// Cholesky factor cached. Null directions (pivots below tolerance) get a
/// zero column in the factor, so rank may be below dim.
struct MvnSpec {
    int dim = 0;
    std::array<double, 4> mean{};
    Mat4 cov{};
    Mat4 chol{};
    std::size_t rank = 0;

    static MvnSpec make(int dim, const double* mean, const Mat4& cov) {
        if (dim < 1 || dim > 4) throw std::invalid_argument("MvnSpec: dim must be in 1..4");
        MvnSpec spec;
        spec.dim = dim;
        double scale = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(cov[i][j]));
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j)
                if (std::abs(cov[i][j] - cov[j][i]) > 1e-12 * std::max(scale, 1.0))
                    throw std::domain_error("MvnSpec: covariance is not symmetric");
        spec.cov = zeros<4, 4>();
        for (int i = 0; i < dim; ++i) {
            spec.mean[i] = mean[i];
            for (int j = 0; j < dim; ++j)
                spec.cov[i][j] = 0.5 * (cov[i][j] + cov[j][i]);
        }
        const double lmin = min_eigenvalue<4>(spec.cov, static_cast<std::size_t>(dim));
        if (lmin < -1e-10)
            throw std::domain_error("MvnSpec: covariance has a negative eigenvalue");
        if (lmin < 0.0) // clip tiny negative curvature before factoring
            for (int i = 0; i < dim; ++i) spec.cov[i][i] -= lmin;
        spec.rank = cholesky_psd<4>(spec.cov, spec.chol, static_cast<std::size_t>(dim), 1e-10);
        return spec;
    }

    bool diagonal() const {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (i != j && cov[i][j] != 0.0) return false;
        return true;
    }
};

struct PsiOptions {
    std::uint64_t seed = 0x2c7f1ad9u;
    int randomizations = 16; // independent shifts of the lattice
    int points = 8192;       // Kronecker points per randomization
    bool force_qmc = false;  // bypass the diagonal product fast path (tests)
};

struct PsiResult {
    double value = 0.0;
    double std_error = 0.0;
    bool qmc = false;
};

namespace detail {

// Pr[Z <= t] for diagonal covariance: exact product of Phi factors.
inline PsiResult psi_diagonal(const std::vector<double>& t, const MvnSpec& spec) {
    double prod = 1.0;
    for (int i = 0; i < spec.dim; ++i) {
        const double sd = std::sqrt(spec.cov[i][i]);
        if (sd == 0.0) {
            if (t[static_cast<std::size_t>(i)] < spec.mean[i]) return {0.0, 0.0, false};
            continue;
        }
        prod *= std_normal_cdf((t[static_cast<std::size_t>(i)] - spec.mean[i]) / sd);
    }
    return {prod, 0.0, false};
}

// Genz separation-of-variables integrand on the Cholesky-whitened problem.
// w holds dim-1 coordinates of one low-discrepancy point in [0,1).
inline double genz_integrand(const std::vector<double>& t, const MvnSpec& spec,
                             const double* w) {
    double y[4] = {0, 0, 0, 0};
    double prod = 1.0;
    for (int j = 0; j < spec.dim; ++j) {
        double cond = spec.mean[j];
        for (int k = 0; k < j; ++k) cond += spec.chol[j][k] * y[k];
        const double ljj = spec.chol[j][j];
        const double r = t[static_cast<std::size_t>(j)] - cond;
        if (ljj == 0.0) {
            if (r < 0.0) return 0.0; // deterministic coordinate violates the bound
            continue;
        }
        const double e = std_normal_cdf(r / ljj);
        if (e <= 0.0) return 0.0;
        prod *= e;
        if (j + 1 < spec.dim) {
            double u = w[j] * e;
            u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
            y[j] = std_normal_quantile(u);
        }
    }
    return prod;
}

inline PsiResult psi_qmc(const std::vector<double>& t, const MvnSpec& spec,
                         const PsiOptions& opt) {
    const int m = spec.dim - 1; // integration dimension
    // Kronecker (Weyl) sequence directions: fractional parts of sqrt(primes)
    static const double alpha[3] = {0.41421356237309515, 0.7320508075688772,
                                    0.23606797749978969};
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(opt.randomizations));
    for (int rep = 0; rep < opt.randomizations; ++rep) {
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(rep), 0);
        double shift[3] = {0, 0, 0};
        for (int j = 0; j < m; ++j) shift[j] = rng.next_uniform();
        double acc = 0.0;
        double w[3] = {0, 0, 0};
        for (int i = 0; i < opt.points; ++i) {
            for (int j = 0; j < m; ++j) {
                double v = std::fma(static_cast<double>(i), alpha[j], shift[j]);
                w[j] = v - std::floor(v);
            }
            acc += genz_integrand(t, spec, w);
        }
        means.push_back(acc / opt.points);
    }
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    const auto k = static_cast<double>(means.size());
    const double se = k > 1 ? std::sqrt(var / (k * (k - 1.0))) : 0.0;
    return {std::min(std::max(mean, 0.0), 1.0), se, true};
}

} // namespace detail

/// Psi(t; mean, cov) = Pr[Z <= t componentwise], Z ~ N(mean, cov).
/// Coordinates with t=+inf are marginalized out symbolically; any t=-inf
/// gives 0. Diagonal covariances use the exact product of Phi terms; general
/// covariances a randomized Kronecker-lattice rule on the Genz transform
/// with a reported standard error.
inline PsiResult psi_upper(const std::vector<double>& t, const MvnSpec& spec,
                           const PsiOptions& opt = {}) {
    if (static_cast<int>(t.size()) != spec.dim)
        throw std::invalid_argument("psi_upper: threshold dimension mismatch");
    for (double v : t) {
        if (std::isnan(v)) throw std::domain_error("psi_upper: NaN threshold");
        if (v == -std::numeric_limits<double>::infinity()) return {0.0, 0.0, false};
    }

    std::vector<int> keep;
    for (int i = 0; i < spec.dim; ++i)
        if (t[static_cast<std::size_t>(i)] != std::numeric_limits<double>::infinity())
            keep.push_back(i);
    if (keep.empty()) return {1.0, 0.0, false};

    if (static_cast<int>(keep.size()) < spec.dim) {
        // reduce to the finite-threshold marginal and refactor
        std::array<double, 4> mean{};
        Mat4 cov = zeros<4, 4>();
        std::vector<double> tr;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            mean[i] = spec.mean[static_cast<std::size_t>(keep[i])];
            tr.push_back(t[static_cast<std::size_t>(keep[i])]);
            for (std::size_t j = 0; j < keep.size(); ++j)
                cov[i][j] = spec.cov[static_cast<std::size_t>(keep[i])]
                                    [static_cast<std::size_t>(keep[j])];
        }
        const MvnSpec reduced = MvnSpec::make(static_cast<int>(keep.size()), mean.data(), cov);
        return psi_upper(tr, reduced, opt);
    }

    if (spec.dim == 1 || (spec.diagonal() && !opt.force_qmc))
        return detail::psi_diagonal(t, spec);
    return detail::psi_qmc(t, spec, opt);
}

/// Inputs of the multivariate Berry-Esseen constant: dimension, average
/// third absolute moment, minimum covariance eigenvalue and blocklength.
struct BeBoundInputs {
    int dim;
    double third_moment;
    double lambda_min;
    std::uint64_t n;

    void validate() const {
        if (dim < 1) throw std::domain_error("BeBoundInputs: dim must be >= 1");
        if (!(third_moment >= 0.0) || !std::isfinite(third_moment))
            throw std::domain_error("BeBoundInputs: third moment must be finite and >= 0");
        if (!(lambda_min > 0.0) || !std::isfinite(lambda_min))
            throw std::domain_error("BeBoundInputs: lambda_min must be finite and positive");
        if (n < 1) throw std::domain_error("BeBoundInputs: n must be >= 1");
    }
};

/// 254 sqrt(m) t / (lambda_min^{3/2} sqrt(n)). Diagnostic only: it
/// quantifies the proof constants and never gates a result.
inline double berry_esseen_bound(const BeBoundInputs& in) {
    in.validate();
    return 254.0 * std::sqrt(static_cast<double>(in.dim)) * in.third_moment /
           (std::pow(in.lambda_min, 1.5) * std::sqrt(static_cast<double>(in.n)));
}

} // namespace icdisp
