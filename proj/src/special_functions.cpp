// SPDX-License-Identifier: Apache-2.0

#include "rsma/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

bool is_integer_order(double v) { return std::isfinite(v) && v == std::floor(v) && v >= 0.0; }

// e^x E_n(x) for x > 1: modified Lentz evaluation of the continued fraction.
double scaled_en_continued_fraction(int n, double x, int max_terms) {
    const double nm1 = n - 1;
    double b = x + n;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_terms; ++i) {
        const double a = -i * (nm1 + i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericError("exp_integral: continued fraction did not converge for n=" +
                       std::to_string(n) + ", x=" + std::to_string(x));
}

// E_n(x) for 0 < x <= 1, n >= 1: power series.
double en_series(int n, double x, int max_terms) {
    const int nm1 = n - 1;
    double ans = nm1 != 0 ? 1.0 / nm1 : -std::log(x) - kEulerGamma;
    double fact = 1.0;
    for (int i = 1; i <= max_terms; ++i) {
        fact *= -x / i;
        double del;
        if (i != nm1) {
            del = -fact / (i - nm1);
        } else {
            double psi = -kEulerGamma;
            for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::abs(del) < std::abs(ans) * kEps) return ans;
    }
    throw NumericError("exp_integral: series did not converge for n=" + std::to_string(n) +
                       ", x=" + std::to_string(x));
}

}  // namespace

void NumericTolerances::validate() const {
    if (!(quadrature_abs_tol > 0.0) || !(bisection_tol > 0.0))
        throw DomainError("NumericTolerances: tolerances must be strictly positive");
    if (series_max_terms < 10) throw DomainError("NumericTolerances: series_max_terms must be >= 10");
}

double gauss_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gauss_q_inv(double beta, const NumericTolerances& tol) {
    if (!(beta > 0.0 && beta < 1.0))
        throw DomainError("gauss_q_inv: beta must lie in (0,1), got " + std::to_string(beta));
    // Q is strictly decreasing; Q(-40) == 1 and Q(40) underflows in double.
    double lo = -40.0;
    double hi = 40.0;
    while (hi - lo > tol.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (gauss_q(mid) > beta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double channel_dispersion(double x) {
    if (!(x >= 0.0)) throw DomainError("channel_dispersion: SINR must be nonnegative");
    if (std::isinf(x)) return kLog2E * kLog2E;
    const double inv = 1.0 / (1.0 + x);
    return (1.0 - inv * inv) * kLog2E * kLog2E;
}

double exp_integral_scaled(int n, double x, const NumericTolerances& tol) {
    if (n < 0) throw DomainError("exp_integral_scaled: order must be nonnegative");
    if (!(x > 0.0)) throw DomainError("exp_integral_scaled: x must be positive");
    if (std::isinf(x)) return 0.0;
    if (n == 0) return 1.0 / x;
    if (x > 1.0) return scaled_en_continued_fraction(n, x, std::max(tol.series_max_terms, 1000));
    return std::exp(x) * en_series(n, x, tol.series_max_terms);
}

double exp_integral_generalized(double v, double x, const NumericTolerances& tol) {
    if (!(x > 0.0)) throw DomainError("exp_integral_generalized: x must be positive");
    if (std::isnan(v)) throw DomainError("exp_integral_generalized: order is NaN");
    if (is_integer_order(v) && v < 1e6) {
        const int n = static_cast<int>(v);
        if (n == 0) return std::exp(-x) / x;
        if (x > 1.0)
            return scaled_en_continued_fraction(n, x, std::max(tol.series_max_terms, 1000)) *
                   std::exp(-x);
        return en_series(n, x, tol.series_max_terms);
    }
    // E_v(x) = e^{-x} int_0^inf e^{-xu} (1+u)^{-v} du
    auto integrand = [v, x](double u) { return std::exp(-x * u - v * std::log1p(u)); };
    double err = 0.0;
    const double rel_tol = std::max(tol.quadrature_abs_tol * 1e-2, 1e-14);
    const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 20, rel_tol, &err);
    return std::exp(-x) * integral;
}

double psi_capacity_series(int n, double c1, double c2, const NumericTolerances& tol) {
    if (n < 1) throw DomainError("psi_capacity_series: n must be >= 1");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("psi_capacity_series: c1, c2 must be positive");
    if (std::abs(c2 - 1.0) < 1e-6)
        throw SingularParameterError("psi_capacity_series: c2 within 1e-6 of 1; perturb c2");
    const double x = c1 / c2;
    const double a = 1.0 - c2;
    // a^n * e^x * Psi(n) = e^{c1} E_1(c1) - sum_i a^{i-1} e^x E_i(x)
    double acc = exp_integral_scaled(1, c1, tol);
    double apow = 1.0;
    for (int i = 1; i <= n; ++i) {
        acc -= apow * exp_integral_scaled(i, x, tol);
        apow *= a;
    }
    return std::exp(-x) * acc / std::pow(a, n);
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: x must be positive");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Asymptotic expansion with Bernoulli coefficients B_2k / (2k).
    const double tail =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
    return shift + std::log(x) - 0.5 * inv - tail;
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

}  // namespace rsma
