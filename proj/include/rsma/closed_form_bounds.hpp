// SPDX-License-Identifier: Apache-2.0
//
// Closed-form lower bounds on the ergodic finite-blocklength rates of the
// common and private RSMA streams, built from Gamma moment matching.

#pragma once

#include <span>
#include <vector>

#include "rsma/channel_model.hpp"
#include "rsma/special_functions.hpp"

namespace rsma {

struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;

    void validate() const;
    double mean() const { return shape * scale; }
    double variance() const { return shape * scale * scale; }
};

/// Single Gamma with the first two moments of a sum of independent Gammas.
GammaParams gamma_moment_match(std::span<const GammaParams> components);

/// Aggregate private-stream interference seen by the common stream of one user.
GammaParams aggregate_interference_params(int nt, int k, double epsilon);

struct CommonBoundParams {
    double c1 = 1.0;
    double c2 = 1.0;
    int d_int = 1;
};

/// Round half away from zero.
int round_nearest(double x);

/// Parameters of the common-stream SINR CDF. Heterogeneous epsilon: d_int is
/// the rounded sum of per-user shapes and c2 uses their shape-weighted scale.
/// Throws SingularParameterError for t outside (0,1).
CommonBoundParams common_cdf_params(double t, double power_mW, std::span<const double> zeta, int nt,
                                    std::span<const double> epsilon);
CommonBoundParams common_cdf_params(double t, double power_mW, std::span<const double> zeta, int nt, double epsilon);

/// F(y) = 1 - exp(-c1 y) / (c2 y + 1)^d.
double common_cdf(double y, const CommonBoundParams& p);

/// E[log2(1 + Gamma_c)] under the CDF above. Near c2 = 1 the literal finite
/// sum cancels catastrophically, so an exact series in (1-c2) is used there.
double expected_common_capacity(const CommonBoundParams& p, const NumericTolerances& tol = {});

/// E[Gamma_c] = e^{c1/c2} E_d(c1/c2) / c2.
double expected_common_sinr(const CommonBoundParams& p, const NumericTolerances& tol = {});

struct XkParams {
    GammaParams gamma;
    double alpha = 0.0;  ///< E[ln X] under the Gamma fit
};

struct YkParams {
    double shape = 0.0;
    double scale = 0.0;
    double eta = 0.0;  ///< (1 - eps^2)(1 - mu_k)
    bool interference_free = false;
};

struct PrivateBoundParams {
    GammaParams m;  ///< desired-signal gain fit
    double ck1 = 0.0;
    double ck2 = 0.0;
    double alpha = 0.0;
    double eta = 0.0;
};

XkParams private_xk_params(std::span<const double> mu, double epsilon, int nt, int k);
YkParams private_yk_params(std::span<const double> mu, double epsilon, int k);
GammaParams private_mk_params(double epsilon, int nt, int num_users);

/// Bound evaluator with the per-scenario constants (Q^{-1}, blocklengths,
/// zeta, epsilon) resolved once. Cheap to call inside optimizers.
class BoundEvaluator {
public:
    BoundEvaluator(const SystemConfig& config, const DerivedLink& link, NumericTolerances tol = {});

    /// R_c hat; 0 for t >= 1, t clipped to [1e-4, 1 - 1e-4] otherwise.
    double common(double t) const;

    /// E[Gamma_p,k] under the fitted model.
    double private_sinr_mean(double t, std::span<const double> mu, int k) const;

    /// R_k hat before clamping at 0; QoS constraints use this smooth form.
    double private_unclamped(double t, std::span<const double> mu, int k) const;

    double private_rate(double t, std::span<const double> mu, int k) const;
    std::vector<double> private_rates(double t, std::span<const double> mu) const;
    double private_sum(double t, std::span<const double> mu) const;

    /// R_c hat + sum_k R_k hat.
    double sum(double t, std::span<const double> mu) const;

    PrivateBoundParams private_params(double t, std::span<const double> mu, int k) const;
    CommonBoundParams common_params(double t) const;

    int users() const { return k_; }
    double power_mW() const { return power_; }
    const std::vector<double>& zeta() const { return zeta_; }
    const std::vector<double>& epsilon() const { return eps_; }

private:
    int nt_;
    int k_;
    double power_;
    std::vector<double> zeta_;
    std::vector<double> eps_;
    double common_penalty_;                ///< Q^{-1}(beta_c) / sqrt(l_c), worst user
    std::vector<double> private_penalty_;  ///< Q^{-1}(beta_p,k) / sqrt(l_k)
    NumericTolerances tol_;
};

double common_rate_lower_bound(double t, const SystemConfig& config, const DerivedLink& link);
double private_sinr_mean(double t, std::span<const double> mu, const SystemConfig& config, const DerivedLink& link,
                         int k);
double private_rate_lower_bound(double t, std::span<const double> mu, const SystemConfig& config,
                                const DerivedLink& link, int k);
double bound_sum_rate(double t, std::span<const double> mu, const SystemConfig& config, const DerivedLink& link);

}  // namespace rsma
