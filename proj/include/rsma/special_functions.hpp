// SPDX-License-Identifier: Apache-2.0
//
// Scalar special functions used by the finite-blocklength rate formula and
// by the closed-form ergodic-rate bounds. All functions are pure.

#pragma once

#include <numbers>

namespace rsma {

struct NumericTolerances {
    double quadrature_abs_tol = 1e-10;
    int series_max_terms = 200;
    double bisection_tol = 1e-12;

    /// Throws DomainError when a tolerance is non-positive or max_terms < 10.
    void validate() const;
};

inline constexpr double kLog2E = std::numbers::log2e;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Upper-tail standard normal probability Q(x).
double gauss_q(double x);

/// Inverse of Q by bisection; beta must lie in (0,1).
double gauss_q_inv(double beta, const NumericTolerances& tol = {});

/// Channel dispersion V(x) = (1 - (1+x)^-2) (log2 e)^2, x >= 0.
double channel_dispersion(double x);

/// Generalized exponential integral E_v(x) = int_1^inf e^{-tx} t^{-v} dt, x > 0.
/// Integer orders use series / continued fraction; other orders use quadrature.
double exp_integral_generalized(double v, double x, const NumericTolerances& tol = {});

/// e^x E_n(x) for integer n >= 0 and x > 0. Finite for every x, including
/// arguments where e^x alone overflows. x = +inf returns 0.
double exp_integral_scaled(int n, double x, const NumericTolerances& tol = {});

/// Psi(n) = e^{(c1/c2)(c2-1)} E_1(c1) / (1-c2)^n - sum_{i=1..n} E_i(c1/c2) / (1-c2)^{n+1-i}.
/// Evaluated literally as the finite sum; throws SingularParameterError when
/// |c2 - 1| < 1e-6.
double psi_capacity_series(int n, double c1, double c2, const NumericTolerances& tol = {});

/// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

/// Zeroth-order Bessel function of the first kind.
double bessel_j0(double x);

}  // namespace rsma
