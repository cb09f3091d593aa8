#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include <icdisp/mvn.hpp>
#include <icdisp/special.hpp>

#include "oracles.hpp"

using namespace icdisp;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

MvnSpec make2(double v1, double v2, double off, double m1 = 0.0, double m2 = 0.0) {
    Mat4 cov = zeros<4, 4>();
    cov[0][0] = v1;
    cov[1][1] = v2;
    cov[0][1] = cov[1][0] = off;
    const double mean[2] = {m1, m2};
    return MvnSpec::make(2, mean, cov);
}

} // namespace

TEST_CASE("diagonal case is the exact product of Phi factors") {
    const auto spec = make2(1.0, 1.0, 0.0);
    const auto r = psi_upper({0.0, 0.0}, spec);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_FALSE(r.qmc);

    const double v1 = 0.375, v2 = 0.375, l1 = -1.3, l2 = -0.4;
    const auto diag = make2(v1, v2, 0.0);
    const double expect =
        std_normal_cdf(-l1 / std::sqrt(v1)) * std_normal_cdf(-l2 / std::sqrt(v2));
    CHECK_THAT(psi_upper({-l1, -l2}, diag).value, Catch::Matchers::WithinAbs(expect, 1e-10));
}

TEST_CASE("bivariate orthant with correlation matches the closed form") {
    const auto spec = make2(1.0, 1.0, 0.5);
    const auto r = psi_upper({0.0, 0.0}, spec);
    CHECK(r.qmc);
    CHECK(r.std_error <= 1e-4);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(oracles::bivariate_orthant(0.5),
                                                   3.0 * r.std_error + 1e-6));
    const auto rn = psi_upper({0.0, 0.0}, make2(1.0, 1.0, -0.75));
    CHECK_THAT(rn.value, Catch::Matchers::WithinAbs(oracles::bivariate_orthant(-0.75),
                                                    3.0 * rn.std_error + 1e-6));
}

TEST_CASE("qmc path agrees with the product on diagonal covariances") {
    const auto spec = make2(0.375, 0.8, 0.0);
    PsiOptions opt;
    opt.force_qmc = true;
    for (double t1 : {-1.0, 0.3}) {
        for (double t2 : {-0.5, 1.2}) {
            const auto exact = psi_upper({t1, t2}, spec);
            const auto qmc = psi_upper({t1, t2}, spec, opt);
            CHECK(qmc.qmc);
            CHECK_THAT(qmc.value, Catch::Matchers::WithinAbs(exact.value,
                                                             3.0 * qmc.std_error + 1e-7));
        }
    }
}

TEST_CASE("psi is monotone in each threshold coordinate") {
    const auto spec = make2(1.0, 2.0, 0.7);
    double prev = -1.0;
    for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double v = psi_upper({t, 0.5}, spec).value;
        CHECK(v >= prev - 1e-5);
        prev = v;
    }
    prev = -1.0;
    for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double v = psi_upper({0.5, t}, spec).value;
        CHECK(v >= prev - 1e-5);
        prev = v;
    }
}

TEST_CASE("infinite thresholds reduce to the marginal") {
    const auto spec = make2(1.5, 2.5, 0.9);
    const auto r = psi_upper({0.7, kInf}, spec);
    CHECK_FALSE(r.qmc); // reduced to one dimension, evaluated exactly
    CHECK_THAT(r.value,
               Catch::Matchers::WithinAbs(std_normal_cdf(0.7 / std::sqrt(1.5)), 1e-12));
    CHECK(psi_upper({kInf, kInf}, spec).value == 1.0);
    CHECK(psi_upper({-kInf, 0.0}, spec).value == 0.0);
}

TEST_CASE("psi stays within [0,1] on random specs") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 25; ++rep) {
        const double a = 0.2 + std::abs(u(gen));
        const double b = 0.2 + std::abs(u(gen));
        double r = u(gen) / 2.1; // correlation in (-1,1) roughly
        const auto spec = make2(a, b, r * std::sqrt(a * b), u(gen), u(gen));
        const auto res = psi_upper({u(gen), u(gen)}, spec);
        CHECK(res.value >= 0.0);
        CHECK(res.value <= 1.0);
    }
}

TEST_CASE("trivariate equicorrelated orthant matches the closed form") {
    // Pr[Z <= 0] in dim 3 with pairwise correlation rho:
    // 1/8 + (3/(4 pi)) asin(rho)
    for (double rho : {0.5, -0.3, 0.8}) {
        Mat4 cov = zeros<4, 4>();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] = i == j ? 1.0 : rho;
        const double mean[3] = {0, 0, 0};
        const MvnSpec spec = MvnSpec::make(3, mean, cov);
        const double target = 0.125 + 3.0 * std::asin(rho) / (4.0 * M_PI);
        const auto r = psi_upper({0.0, 0.0, 0.0}, spec);
        CHECK_THAT(r.value, Catch::Matchers::WithinAbs(target, 3.0 * r.std_error + 3e-5));
    }
}

TEST_CASE("four-dimensional psi agrees with a plain Monte-Carlo oracle") {
    // covariance: the density covariance matrix of the reference channel
    const ChannelParams ch{1.0, 4.0, 3.0, 1.0, 1.0, 1.0};
    const SecondOrder so = second_order(ch);
    const double mean[4] = {0, 0, 0, 0};
    const MvnSpec spec = MvnSpec::make(4, mean, so.vd);
    const std::vector<double> t = {0.2, -0.3, 0.5, 0.1};
    const auto r = psi_upper(t, spec);

    // oracle: direct indicator Monte Carlo through the Cholesky factor
    const std::uint64_t draws = 2000000;
    std::uint64_t hits = 0;
    CounterRng rng(777777, 0, 0);
    for (std::uint64_t i = 0; i < draws; ++i) {
        double g[4], z[4];
        for (double& v : g) v = rng.next_gaussian();
        bool inside = true;
        for (int row = 0; row < 4 && inside; ++row) {
            z[row] = 0.0;
            for (int kcol = 0; kcol <= row; ++kcol) z[row] += spec.chol[row][kcol] * g[kcol];
            inside = z[row] <= t[static_cast<std::size_t>(row)];
        }
        hits += inside ? 1 : 0;
    }
    const double mc = static_cast<double>(hits) / static_cast<double>(draws);
    const double mc_se = std::sqrt(mc * (1.0 - mc) / static_cast<double>(draws));
    CHECK(r.qmc);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(mc, 3.0 * (r.std_error + mc_se) + 1e-5));

    // marginalizing the last two coordinates reproduces the diagonal block
    const auto reduced = psi_upper({0.2, -0.3, std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()},
                                   spec);
    const double prod = std_normal_cdf(0.2 / std::sqrt(so.v1)) *
                        std_normal_cdf(-0.3 / std::sqrt(so.v2));
    CHECK_THAT(reduced.value, Catch::Matchers::WithinAbs(prod, 1e-10));
}

TEST_CASE("rank-deficient covariance integrates the projected problem") {
    // Z2 == Z1 almost surely: Pr[Z1 <= 0, Z2 <= 0.5] = Phi(0)
    const auto spec = make2(1.0, 1.0, 1.0);
    CHECK(spec.rank == 1);
    const auto r = psi_upper({0.0, 0.5}, spec);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(0.5, 3.0 * r.std_error + 1e-6));
    const auto r2 = psi_upper({0.0, -0.5}, spec); // binding second constraint
    CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(std_normal_cdf(-0.5),
                                                    3.0 * r2.std_error + 1e-6));
}

TEST_CASE("spec validation rejects bad inputs") {
    Mat4 asym = zeros<4, 4>();
    asym[0][0] = 1.0;
    asym[1][1] = 1.0;
    asym[0][1] = 0.3;
    asym[1][0] = 0.1;
    const double mean[2] = {0, 0};
    CHECK_THROWS_AS(MvnSpec::make(2, mean, asym), std::domain_error);

    Mat4 indef = zeros<4, 4>();
    indef[0][0] = 1.0;
    indef[1][1] = 1.0;
    indef[0][1] = indef[1][0] = 1.5;
    CHECK_THROWS_AS(MvnSpec::make(2, mean, indef), std::domain_error);

    CHECK_THROWS_AS(MvnSpec::make(0, mean, zeros<4, 4>()), std::invalid_argument);
    const auto ok = make2(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(psi_upper({0.0, 0.0, 0.0}, ok), std::invalid_argument);
    CHECK_THROWS_AS(psi_upper({std::nan(""), 0.0}, ok), std::domain_error);
}

TEST_CASE("berry esseen bound constant") {
    CHECK_THAT(berry_esseen_bound({1, 1.0, 1.0, 254 * 254}),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    double prev = kInf;
    for (std::uint64_t n : {10ull, 100ull, 1000ull, 100000ull}) {
        const double b = berry_esseen_bound({2, 0.7, 0.375, n});
        CHECK(b < prev);
        prev = b;
    }
    CHECK_THROWS_AS(berry_esseen_bound({2, -1.0, 1.0, 10}), std::domain_error);
    CHECK_THROWS_AS(berry_esseen_bound({2, 1.0, 0.0, 10}), std::domain_error);
    CHECK_THROWS_AS(berry_esseen_bound({0, 1.0, 1.0, 10}), std::domain_error);
}

TEST_CASE("qmc result is deterministic in the seed") {
    const auto spec = make2(1.0, 1.0, 0.4);
    const auto a = psi_upper({0.3, -0.2}, spec);
    const auto b = psi_upper({0.3, -0.2}, spec);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    PsiOptions other;
    other.seed = 77;
    CHECK(psi_upper({0.3, -0.2}, spec, other).value != a.value);
}
