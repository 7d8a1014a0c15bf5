// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "rsma/errors.hpp"
#include "rsma/special_functions.hpp"

using namespace rsma;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("gauss_q matches the integral of the normal density") {
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.0, 2.5, 4.0, 4.753424308822899, 6.0, 8.0})
        CHECK(rel(gauss_q(x), oracle::gauss_q(x)) < 1e-9);
    CHECK(gauss_q(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gauss_q_inv frozen values and round trip") {
    CHECK(gauss_q_inv(1e-6) == doctest::Approx(4.753424308822899).epsilon(1e-12));
    CHECK(gauss_q_inv(0.05) == doctest::Approx(1.6448536269514727).epsilon(1e-12));
    CHECK(std::abs(gauss_q_inv(0.5)) < 1e-11);
    for (double b : {1e-12, 1e-9, 1e-7, 1e-6, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.99}) {
        CHECK(rel(gauss_q(gauss_q_inv(b)), b) < 1e-8);
        CHECK(rel(oracle::gauss_q(gauss_q_inv(b)), b) < 1e-8);
    }
    CHECK_THROWS_AS(gauss_q_inv(0.0), DomainError);
    CHECK_THROWS_AS(gauss_q_inv(1.0), DomainError);
    CHECK_THROWS_AS(gauss_q_inv(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("channel dispersion") {
    CHECK(channel_dispersion(0.0) == 0.0);
    CHECK(channel_dispersion(1.0) == doctest::Approx(1.5610267357542058).epsilon(1e-14));
    CHECK(channel_dispersion(1e12) == doctest::Approx(2.0813689810056078).epsilon(1e-12));
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 0.05 * i * i;
        const double v = channel_dispersion(x);
        CHECK(v == doctest::Approx(oracle::dispersion(x)).epsilon(1e-13));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(channel_dispersion(-0.1), DomainError);
}

TEST_CASE("generalized exponential integral against the defining integral") {
    CHECK(exp_integral_generalized(1.0, 1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-13));
    CHECK(exp_integral_generalized(2.0, 1.0) == doctest::Approx(0.14849550677592205).epsilon(1e-13));
    CHECK(exp_integral_generalized(0.0, 2.0) == doctest::Approx(0.06766764161830635).epsilon(1e-13));
    for (double v : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 7.0, 12.0, 28.0})
        for (double x : {0.05, 0.3, 1.0, 2.0, 5.0, 20.0}) {
            INFO("v=" << v << " x=" << x);
            CHECK(rel(exp_integral_generalized(v, x), oracle::exp_integral(v, x)) < 1e-9);
        }
}

TEST_CASE("exponential integral recurrence") {
    double worst = 0.0;
    for (double v : {0.5, 1.0, 1.25, 2.0, 3.0, 5.5, 10.0, 27.0})
        for (double x : {0.01, 0.1, 0.5, 1.0, 3.0, 8.0, 30.0}) {
            const double lhs = v * exp_integral_generalized(v + 1.0, x) + x * exp_integral_generalized(v, x);
            worst = std::max(worst, std::abs(lhs - std::exp(-x)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("scaled exponential integral") {
    for (int n : {0, 1, 2, 5, 12, 30})
        for (double x : {1e-3, 0.2, 1.0, 6.0, 40.0, 600.0}) {
            INFO("n=" << n << " x=" << x);
            const double direct = x < 500.0 ? std::exp(x) * oracle::exp_integral(n, x) : 0.0;
            if (x < 500.0) CHECK(rel(exp_integral_scaled(n, x), direct) < 1e-9);
            // e^x E_n(x) lies between 1/(x+n) and 1/(x+n-1) for n >= 1.
            if (n >= 1) {
                const double s = exp_integral_scaled(n, x);
                CHECK(s <= 1.0 / (x + n - 1.0) * (1.0 + 1e-12));
                CHECK(s >= 1.0 / (x + n) * (1.0 - 1e-12));
            }
        }
    CHECK(exp_integral_scaled(3, std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(std::isfinite(exp_integral_scaled(2, 1e6)));
    CHECK_THROWS_AS(exp_integral_scaled(-1, 1.0), DomainError);
    CHECK_THROWS_AS(exp_integral_scaled(1, 0.0), DomainError);
}

TEST_CASE("capacity series Psi") {
    CHECK(psi_capacity_series(1, 1.0, 0.5) == doctest::Approx(0.0636126569587105).epsilon(1e-12));
    CHECK(psi_capacity_series(2, 0.5, 0.25) == doctest::Approx(0.08506873737926767).epsilon(1e-12));
    // e^{c1/c2} Psi(n) is the integral of e^{-c1 y} / ((1+c2 y)^n (1+y)).
    for (int n : {1, 2, 4, 7})
        for (double c1 : {0.1, 1.0})
            for (double c2 : {0.2, 0.6, 1.7}) {
                const double j = oracle::integrate_half_line(
                    [&](double y) { return oracle::survival(y, c1, c2, n) / (1.0 + y); }, 1e-14);
                INFO("n=" << n << " c1=" << c1 << " c2=" << c2);
                CHECK(rel(std::exp(c1 / c2) * psi_capacity_series(n, c1, c2), j) < 1e-7);
            }
    CHECK_THROWS_AS(psi_capacity_series(2, 1.0, 1.0), SingularParameterError);
    CHECK_THROWS_AS(psi_capacity_series(2, 1.0, 1.0 + 5e-7), SingularParameterError);
}

TEST_CASE("digamma") {
    CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-14));
    CHECK(digamma(2.0) == doctest::Approx(0.42278433509846714).epsilon(1e-14));
    CHECK(digamma(7.0488) == doctest::Approx(1.8802494602258945).epsilon(1e-13));
    CHECK(digamma(18.0625 / 2.5625) == doctest::Approx(1.8802464864576075).epsilon(1e-13));
    for (double x : {0.01, 0.2, 0.5, 1.3, 3.7, 12.0, 55.0, 400.0}) {
        INFO("x=" << x);
        CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-10);
        CHECK(std::abs(digamma(x) - oracle::digamma_series(x)) < 1e-9 * std::max(1.0, std::abs(digamma(x))));
    }
    CHECK_THROWS_AS(digamma(0.0), DomainError);
}

TEST_CASE("bessel J0") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j0(1.5103) == doctest::Approx(0.5060735797695957).epsilon(1e-13));
    CHECK(std::abs(bessel_j0(2.404826)) < 1e-6);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = 0.01 * i;
        worst = std::max(worst, std::abs(bessel_j0(x) - oracle::bessel_j0_series(x)));
    }
    CHECK(worst < 1e-9);
    for (double x : {0.5, 3.0, 9.5, 25.0}) CHECK(std::abs(bessel_j0(x) - oracle::bessel_j0_integral(x)) < 1e-10);
    CHECK(bessel_j0(-2.0) == doctest::Approx(bessel_j0(2.0)));
}

TEST_CASE("NumericTolerances validation") {
    NumericTolerances t;
    CHECK_NOTHROW(t.validate());
    t.quadrature_abs_tol = 0.0;
    CHECK_THROWS_AS(t.validate(), DomainError);
    t = {};
    t.series_max_terms = 5;
    CHECK_THROWS_AS(t.validate(), DomainError);
}
