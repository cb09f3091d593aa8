#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include <icdisp/special.hpp>

#include "oracles.hpp"

using namespace icdisp;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("gaussian capacity values") {
    CHECK(gaussian_capacity(0.0) == 0.0);
    CHECK_THAT(gaussian_capacity(1.0), Catch::Matchers::WithinAbs(0.5 * std::log(2.0), 1e-15));
    CHECK_THAT(gaussian_capacity(9.0), Catch::Matchers::WithinAbs(0.5 * std::log(10.0), 1e-15));
    CHECK_THROWS_AS(gaussian_capacity(-1e-12), std::domain_error);
    CHECK_THROWS_AS(gaussian_capacity(kInf), std::domain_error);
    CHECK_THROWS_AS(gaussian_capacity(std::nan("")), std::domain_error);
}

TEST_CASE("gaussian capacity is increasing and concave") {
    double prev = gaussian_capacity(0.0);
    double prev_diff = kInf;
    for (int i = 1; i <= 400; ++i) {
        const double s = 0.05 * i;
        const double c = gaussian_capacity(s);
        CHECK(c > prev);
        const double diff = c - prev;
        CHECK(diff < prev_diff + 1e-15);
        prev = c;
        prev_diff = diff;
    }
}

TEST_CASE("gaussian dispersion values and limit") {
    CHECK(gaussian_dispersion(0.0) == 0.0);
    CHECK_THAT(gaussian_dispersion(1.0), Catch::Matchers::WithinAbs(0.375, 1e-15));
    CHECK_THAT(gaussian_dispersion(1e8), Catch::Matchers::WithinAbs(0.5, 1e-7));
    // strictly below 1/2 and increasing while 1/(s+1)^2 is resolvable in double
    double prev = -1.0;
    for (double s : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 1e3, 1e5, 1e7}) {
        const double v = gaussian_dispersion(s);
        CHECK(v < 0.5);
        CHECK(v > prev);
        prev = v;
    }
    // stays finite and at the limit for huge arguments
    CHECK(gaussian_dispersion(1e300) <= 0.5);
    CHECK(gaussian_dispersion(1e300) >= 0.5 - 1e-15);
    CHECK_THROWS_AS(gaussian_dispersion(-0.5), std::domain_error);
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(kInf) == 1.0);
    CHECK(std_normal_cdf(-kInf) == 0.0);
    CHECK_THAT(std_normal_cdf(1.0),
               Catch::Matchers::WithinAbs(oracles::simpson_normal_cdf(1.0), 1e-12));
    CHECK_THAT(std_normal_cdf(-2.5),
               Catch::Matchers::WithinAbs(oracles::simpson_normal_cdf(-2.5), 1e-12));
    CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
}

TEST_CASE("standard normal quantile") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    const double q = oracles::bisect([](double x) { return std_normal_cdf(x); }, 0.001,
                                     -10.0, 10.0);
    CHECK_THAT(std_normal_quantile(0.001), Catch::Matchers::WithinAbs(q, 1e-10));
    CHECK_THAT(std_normal_quantile(0.001),
               Catch::Matchers::WithinAbs(-3.0902323061678135, 1e-10));
    for (double p : {0.01, 0.1, 0.9})
        CHECK_THAT(std_normal_cdf(std_normal_quantile(p)), Catch::Matchers::WithinAbs(p, 1e-12));
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.1), std::domain_error);
}

TEST_CASE("cdf and quantile are mutual inverses") {
    // probe p over [1e-6, 1-1e-6] via a uniform grid in the x domain
    for (int i = 0; i <= 200; ++i) {
        const double xg = -4.753 + 2.0 * 4.753 * i / 200.0;
        const double p = std_normal_cdf(xg);
        const double x = std_normal_quantile(p);
        CHECK_THAT(std_normal_cdf(x), Catch::Matchers::WithinAbs(p, 1e-9));
        if (p > 1e-5 && p < 1.0 - 1e-5) {
            const double grow = std_normal_quantile(std::min(p * (1.0 + 1e-9), 1.0 - 1e-16));
            CHECK(grow >= x); // nondecreasing
        }
    }
}

TEST_CASE("log gamma") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK_THAT(log_gamma(0.5), Catch::Matchers::WithinAbs(0.5 * std::log(M_PI), 1e-13));
    CHECK_THAT(log_gamma(0.5),
               Catch::Matchers::WithinAbs(oracles::stirling_log_gamma(0.5), 1e-12));
    CHECK_THAT(log_gamma(10.0), Catch::Matchers::WithinAbs(std::log(362880.0), 1e-12));
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-2.0), std::domain_error);
}

TEST_CASE("binet upper bound dominates log gamma") {
    for (double z : {1.0, 2.5, 5.0, 25.0, 100.0, 5000.0}) {
        const double exact = log_gamma(z);
        const double upper = log_gamma_binet_upper(z);
        CHECK(upper >= exact);
        CHECK(upper - exact <= binet_remainder_bound(z) + 1e-12);
    }
}

TEST_CASE("log bessel i basic values") {
    CHECK_THAT(log_bessel_i(0.0, 1e-8), Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK_THAT(log_bessel_i(1.0, 2.0),
               Catch::Matchers::WithinAbs(oracles::naive_log_bessel_i(1.0, 2.0), 1e-12));
    CHECK_THAT(log_bessel_i(2.5, 0.7),
               Catch::Matchers::WithinAbs(oracles::naive_log_bessel_i(2.5, 0.7), 1e-12));
    CHECK_THROWS_AS(log_bessel_i(-1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(log_bessel_i(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(log_bessel_i(1.0, kInf), std::domain_error);
}

TEST_CASE("scaled bessel ratio bound holds") {
    for (double k : {2.0, 10.0, 50.0})
        for (double z : {1.0, 10.0, 100.0}) {
            const double lhs = log_bessel_i(k, z) - k * std::log(z);
            CHECK(lhs <= log_scaled_bessel_i_upper(k, z));
        }
}

TEST_CASE("log bessel i satisfies the three-term recurrence") {
    // relative form: I_{v-1}/I_v - I_{v+1}/I_v = 2v/z, which crosses the
    // series/asymptotic switch at order 30
    for (double v : {1.0, 2.0, 5.0, 14.5, 29.0, 30.0, 31.0, 45.0, 60.0, 240.0})
        for (double z : {0.5, 2.0, 10.0, 80.0, 300.0}) {
            const double lm = log_bessel_i(v - 1.0, z);
            const double l0 = log_bessel_i(v, z);
            const double lp = log_bessel_i(v + 1.0, z);
            const double lhs = std::exp(lm - l0) - std::exp(lp - l0);
            const double rhs = 2.0 * v / z;
            CHECK_THAT(lhs / rhs, Catch::Matchers::WithinAbs(1.0, 1e-6));
        }
}

TEST_CASE("log bessel i at large order and argument stays finite") {
    // orders near n/2 for n up to 1e4, arguments of the size the ratio
    // checks produce
    for (double v : {499.0, 2499.0, 4999.0}) {
        for (double x : {0.3, 1.0, 2.83}) {
            const double val = log_bessel_i(v, v * x);
            CHECK(std::isfinite(val));
        }
    }
    // spot check against the naive series at the switch boundary
    CHECK_THAT(log_bessel_i(31.0, 15.0),
               Catch::Matchers::WithinAbs(oracles::naive_log_bessel_i(31.0, 15.0, 120), 1e-8));
}

TEST_CASE("log bessel i series renormalization at huge arguments") {
    // low order, huge argument: the series sum alone would overflow
    CHECK_THAT(log_bessel_i(0.0, 2000.0),
               Catch::Matchers::WithinRel(1995.2806727526574, 1e-10));
    CHECK_THAT(log_bessel_i(5.0, 1500.0),
               Catch::Matchers::WithinRel(1495.4161985289927, 1e-10));
    CHECK_THAT(log_bessel_i(12.0, 800.0),
               Catch::Matchers::WithinRel(795.648857318155, 1e-10));
}
